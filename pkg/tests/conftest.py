import pytest

from symdial.ontology import load_builtin_ontology
from symdial.terms import parse_predicates, serialize


def norm_block(text: str, style: str) -> str:
    """Whitespace-normalize annotation text by parsing and re-serializing."""
    return serialize(parse_predicates(text), style)


@pytest.fixture(scope="session")
def concierge_onto():
    return load_builtin_ontology("concierge")


@pytest.fixture(scope="session")
def companion_onto():
    return load_builtin_ontology("companion")
