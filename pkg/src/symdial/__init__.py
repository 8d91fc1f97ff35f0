"""symdial: a neuro-symbolic dialogue engine.

Conversational decisions are made by a symbolic reasoner over ground
predicate terms; natural language enters and leaves only through a
pluggable understand/realize boundary.
"""

from .terms import ParseError, Predicate, parse_predicate, parse_predicates, serialize

__all__ = ["ParseError", "Predicate", "parse_predicate", "parse_predicates", "serialize"]
__version__ = "0.1.0"
