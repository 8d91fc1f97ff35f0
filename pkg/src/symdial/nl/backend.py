"""The natural-language boundary: everything fuzzy stays behind these two calls.

A backend turns an utterance into predicate text (understand) and predicate
text into a reply (realize); the wrappers here parse, validate, and retry
once with the validation report before giving up.  Backends never see the
dialog state beyond the context window they are handed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Protocol, Sequence

from ..ontology import Ontology, validate
from ..terms import ParseError, Predicate, parse_predicates


class BackendUnavailableError(RuntimeError):
    pass


class BackendTimeoutError(TimeoutError):
    pass


class UnparseableOutputError(ValueError):
    def __init__(self, raw: str, problem: str):
        super().__init__(f"backend output still invalid after repair retry: {problem}")
        self.raw = raw
        self.problem = problem


@dataclass(frozen=True)
class UnderstandRequest:
    utterance: str
    context: tuple[tuple[str, str], ...] = ()  # (speaker, text), most recent last
    ontology_summary: str = ""
    examples: tuple[tuple[str, str], ...] = ()  # (utterance, predicate text)
    repair: str | None = None  # validation report, set on the retry


@dataclass(frozen=True)
class RealizeRequest:
    predicates: tuple[Predicate, ...]
    persona: str = ""
    context: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "mock"  # "mock" | "live"
    endpoint: str = ""
    model: str = ""
    credential_env: str = "SYMDIAL_API_KEY"  # never a literal credential
    timeout: float = 30.0
    max_retries: int = 2


class NlBackend(Protocol):
    def understand_text(self, req: UnderstandRequest) -> str: ...

    def realize_text(self, req: RealizeRequest) -> str: ...


def context_window(history: Sequence[tuple[str, str]], k: int = 4) -> tuple[tuple[str, str], ...]:
    """The last k exchanges, oldest first."""
    return tuple(history[-k:])


def understand(backend: NlBackend, req: UnderstandRequest, onto: Ontology) -> list[Predicate]:
    """Parse an utterance into predicates that validate under the ontology.

    Invalid backend output gets one repair retry carrying the report; a
    second failure raises :class:`UnparseableOutputError`.
    """
    raw, problem = "", ""
    for _ in range(2):
        raw = backend.understand_text(req)
        try:
            preds = parse_predicates(raw)
        except ParseError as err:
            problem = str(err)
            req = replace(req, repair=problem)
            continue
        report = validate(preds, onto)
        if report.ok:
            return preds
        problem = str(report)
        req = replace(req, repair=problem)
    raise UnparseableOutputError(raw, problem)


def realize(backend: NlBackend, req: RealizeRequest) -> str:
    """Render reasoner output as user-facing text; always non-empty."""
    text = backend.realize_text(req).strip()
    if not text:
        raise UnparseableOutputError("", "realizer returned empty text")
    return text


def ontology_summary(onto: Ontology) -> str:
    """One-line-per-functor summary handed to backends as parsing scope."""
    lines = [f"task: {onto.task}"]
    for f in onto.functors:
        lines.append(f"functor {f.name}/{f.arity} ({f.kind})")
    for slot in onto.slots:
        domain = "open" if slot.is_open else "{" + ", ".join(slot.domain) + "}"
        flags = "".join(
            label for label, on in [(" queryable", slot.queryable), (" required", slot.required)] if on
        )
        lines.append(f"slot '{slot.name}': {domain}{flags}")
    for category, aspects in onto.aspects.items():
        lines.append(f"aspects of {category}: {', '.join(aspects)}")
    return "\n".join(lines)
