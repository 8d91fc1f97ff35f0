"""Ground predicate terms: the lingua franca between every engine module.

A term looks like ``require('price range',['cheap'])`` or
``talk(movie, Catch Me If You Can, plot episode)``.  Values are atoms
(bare multi-word or single-quoted) and bracketed lists of values.  The
bare/quoted distinction is erased after parsing: a value is just a string
(trimmed) or a tuple of values.  Quoting is only required when an atom
contains a delimiter, so both annotation styles parse with one grammar.

The normative EBNF lives in docs/grammar.md.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

Value = Union[str, tuple]  # str atom, or tuple of Value

# Characters that end a bare atom anywhere.
_DELIMS = ",()[]"
# Top-level predicate separators (periods only act between predicates).
_SEPARATORS = ",.\n"


class ParseError(ValueError):
    """Malformed predicate text.  Carries the byte offset and what was expected."""

    def __init__(self, message: str, offset: int, expected: str):
        super().__init__(f"{message} at offset {offset} (expected {expected})")
        self.offset = offset
        self.expected = expected


def _normalize(value) -> Value:
    if isinstance(value, str):
        return value.strip()
    if isinstance(value, (list, tuple)):
        return tuple(_normalize(v) for v in value)
    raise TypeError(f"predicate argument must be str or list/tuple, got {type(value).__name__}")


@dataclass(frozen=True)
class Predicate:
    """One ground term: a functor plus ordered argument values.

    Equality is structural; atoms are compared whitespace-trimmed and
    case-sensitively.  List arguments may be given as Python lists and are
    stored as tuples.
    """

    functor: str
    args: tuple = ()

    def __post_init__(self):
        functor = self.functor.strip()
        if not functor:
            raise ValueError("predicate functor must be non-empty")
        if any(c in functor for c in _DELIMS + "'.\n"):
            raise ValueError(f"functor {functor!r} contains a delimiter character")
        object.__setattr__(self, "functor", functor)
        object.__setattr__(self, "args", _normalize(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self) -> str:
        return serialize_predicate(self)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def error(self, message: str, expected: str) -> ParseError:
        return ParseError(message, min(self.pos, len(self.text)), expected)

    def skip_spaces(self):
        while not self.eof() and self.text[self.pos] in " \t\r":
            self.pos += 1

    def skip_separators(self):
        while not self.eof() and (self.text[self.pos] in _SEPARATORS or self.text[self.pos].isspace()):
            self.pos += 1

    def scan_bare(self, stop: str) -> str:
        start = self.pos
        while not self.eof() and self.text[self.pos] not in stop:
            self.pos += 1
        return self.text[start:self.pos].strip()

    def scan_quoted(self) -> str:
        # self.pos is on the opening quote
        open_at = self.pos
        self.pos += 1
        out: list[str] = []
        while not self.eof():
            c = self.text[self.pos]
            if c == "\\" and self.pos + 1 < len(self.text) and self.text[self.pos + 1] in "\\'":
                out.append(self.text[self.pos + 1])
                self.pos += 2
            elif c == "'":
                self.pos += 1
                return "".join(out)
            else:
                out.append(c)
                self.pos += 1
        self.pos = open_at
        raise self.error("unterminated quote", "closing '")

    def scan_value(self) -> Value:
        self.skip_spaces()
        c = self.peek()
        if c == "'":
            return self.scan_quoted()
        if c == "[":
            return self.scan_list()
        # A quote is only special at the start of a value, so interior
        # apostrophes survive in bare atoms (make-up identity, Don't Look Up).
        value = self.scan_bare(_DELIMS)
        if not value:
            raise self.error("empty value", "atom, quoted atom, or list")
        return value

    def scan_list(self) -> tuple:
        # self.pos is on the opening bracket
        self.pos += 1
        items: list[Value] = []
        self.skip_spaces()
        if self.peek() == "]":
            self.pos += 1
            return ()
        while True:
            items.append(self.scan_value())
            self.skip_spaces()
            c = self.peek()
            if c == ",":
                self.pos += 1
                continue
            if c == "]":
                self.pos += 1
                return tuple(items)
            raise self.error("unbalanced list", "',' or ']'")

    def scan_args(self) -> tuple:
        # self.pos is on the opening paren
        self.pos += 1
        args: list[Value] = []
        self.skip_spaces()
        if self.peek() == ")":
            self.pos += 1
            return ()
        while True:
            args.append(self.scan_value())
            self.skip_spaces()
            c = self.peek()
            if c == ",":
                self.pos += 1
                continue
            if c == ")":
                self.pos += 1
                return tuple(args)
            raise self.error("unbalanced parentheses", "',' or ')'")

    def scan_predicate(self) -> Predicate:
        functor = self.scan_bare(_DELIMS + ".'\n")
        if not functor:
            raise self.error("empty functor", "functor name")
        args: tuple = ()
        if self.peek() == "(":
            args = self.scan_args()
        return Predicate(functor, args)


def parse_predicates(text: str) -> list[Predicate]:
    """Parse a sequence of predicates separated by commas, periods, or newlines.

    Whitespace between tokens is ignored.  Raises :class:`ParseError` with a
    byte offset on malformed input.
    """
    scanner = _Scanner(text)
    preds: list[Predicate] = []
    scanner.skip_separators()
    while not scanner.eof():
        preds.append(scanner.scan_predicate())
        scanner.skip_spaces()
        if not scanner.eof() and scanner.peek() not in _SEPARATORS:
            raise scanner.error("trailing text after predicate", "',' '.' or newline")
        scanner.skip_separators()
    return preds


def parse_predicate(text: str) -> Predicate:
    """Parse exactly one predicate."""
    preds = parse_predicates(text)
    if len(preds) != 1:
        raise ParseError(f"expected one predicate, got {len(preds)}", 0, "single predicate")
    return preds[0]


def _needs_quoting(atom: str) -> bool:
    if atom == "" or atom != atom.strip():
        return True
    if atom[0] in "'[":
        return True
    return any(c in _DELIMS or c == "\n" for c in atom)


def _serialize_value(value: Value, quote_atoms: bool) -> str:
    if isinstance(value, tuple):
        return "[" + ",".join(_serialize_value(v, quote_atoms) for v in value) + "]"
    if quote_atoms or _needs_quoting(value):
        return "'" + value.replace("\\", "\\\\").replace("'", "\\'") + "'"
    return value


def serialize_predicate(pred: Predicate, quote_atoms: bool = True) -> str:
    if not pred.args:
        return pred.functor
    return pred.functor + "(" + ",".join(_serialize_value(a, quote_atoms) for a in pred.args) + ")"


def serialize(preds: Iterable[Predicate], style: str = "concierge") -> str:
    """Render predicates in one of the two annotation styles.

    concierge quotes every atom and joins with ``,\\n``; companion leaves
    atoms bare unless they contain a delimiter, joins with ``. `` and ends
    with a period.  ``parse_predicates(serialize(p)) == p`` for either style.
    """
    if style == "concierge":
        return ",\n".join(serialize_predicate(p, quote_atoms=True) for p in preds)
    if style == "companion":
        rendered = [serialize_predicate(p, quote_atoms=False) for p in preds]
        return ". ".join(rendered) + "." if rendered else ""
    raise ValueError(f"unknown serialization style {style!r}")
