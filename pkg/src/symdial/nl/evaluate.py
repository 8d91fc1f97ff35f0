"""Parsing-accuracy harness over restaurant meaning-representation data.

Rows pair an attribute list like ``name[The Cedar], eatType[pub],
priceRange[cheap]`` with a natural-language description.  The backend reads
the description; exact match against the gold predicates, after the
normalization documented here, scores the row.

Normalization (reported inside every result):
  * slot names canonicalized (eatType -> establishment, priceRange ->
    price range, familyFriendly -> family friendly, food -> food type)
  * values compared casefolded
  * predicate order ignored
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from ..terms import ParseError, Predicate, parse_predicates, serialize
from .backend import NlBackend, UnderstandRequest

NORMALIZATION = "slots canonicalized; values casefolded; order ignored"

_SLOT_CANON = {
    "eattype": "establishment",
    "pricerange": "price range",
    "customer rating": "customer rating",
    "familyfriendly": "family friendly",
    "food": "food type",
    "name": "name",
    "area": "area",
    "near": "near",
}

_MR_PATTERN = re.compile(r"([^,\[\]]+)\[([^\]]*)\]")


class DatasetMissingError(FileNotFoundError):
    pass


@dataclass(frozen=True)
class EvalRow:
    mr: str
    ref: str


def canonical_slot(raw: str) -> str:
    key = raw.strip()
    return _SLOT_CANON.get(key.casefold(), key.casefold())


def gold_predicates(mr: str) -> list[Predicate]:
    """Meaning representation -> one require predicate per attribute."""
    preds = []
    for raw_slot, raw_value in _MR_PATTERN.findall(mr):
        preds.append(Predicate("require", [canonical_slot(raw_slot), [raw_value.strip()]]))
    return preds


def load_dataset(path: str | Path) -> list[EvalRow]:
    path = Path(path)
    if not path.exists():
        raise DatasetMissingError(str(path))
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or "mr" not in reader.fieldnames or "ref" not in reader.fieldnames:
            raise DatasetMissingError(f"{path}: expected 'mr' and 'ref' columns")
        return [EvalRow(row["mr"], row["ref"]) for row in reader]


def builtin_sample_path() -> Path:
    return Path(str(resources.files("symdial").joinpath("data/e2e_sample.csv")))


def _normalized(preds) -> frozenset:
    out = set()
    for pred in preds:
        slot = canonical_slot(pred.args[0]) if pred.args and isinstance(pred.args[0], str) else ""
        values = pred.args[1] if pred.arity > 1 and isinstance(pred.args[1], tuple) else ()
        out.add((pred.functor, slot, tuple(sorted(v.casefold() for v in values if isinstance(v, str)))))
    return frozenset(out)


@dataclass
class SlotConfusion:
    correct: int = 0
    wrong_value: int = 0
    missing: int = 0
    spurious: int = 0


@dataclass
class AccuracyReport:
    accuracy: float
    evaluated: int
    correct: int
    shots: int
    normalization: str = NORMALIZATION
    per_slot: Mapping[str, SlotConfusion] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "evaluated": self.evaluated,
            "correct": self.correct,
            "shots": self.shots,
            "normalization": self.normalization,
            "per_slot": {
                slot: {
                    "correct": c.correct,
                    "wrong_value": c.wrong_value,
                    "missing": c.missing,
                    "spurious": c.spurious,
                }
                for slot, c in sorted(self.per_slot.items())
            },
            "failures": self.failures,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def _score_slots(per_slot, gold, got):
    gold_by_slot = {slot: values for _, slot, values in gold}
    got_by_slot = {slot: values for _, slot, values in got}
    for slot, values in gold_by_slot.items():
        cell = per_slot.setdefault(slot, SlotConfusion())
        if slot not in got_by_slot:
            cell.missing += 1
        elif got_by_slot[slot] == values:
            cell.correct += 1
        else:
            cell.wrong_value += 1
    for slot in got_by_slot:
        if slot not in gold_by_slot:
            per_slot.setdefault(slot, SlotConfusion()).spurious += 1


def evaluate_parsing(dataset_path: str | Path, backend: NlBackend, shots: int = 0,
                     limit: int | None = None, max_failures: int = 25) -> AccuracyReport:
    """Exact-match parsing accuracy of a backend over the dataset.

    The first ``shots`` rows become in-context examples and are excluded
    from scoring.  The backend's raw output is parsed leniently (a parse
    failure just scores the row wrong); no ontology repair loop runs here,
    because the harness measures the parser alone.
    """
    rows = load_dataset(dataset_path)
    shot_rows = rows[:shots]
    scored_rows = rows[shots:]
    if limit is not None:
        scored_rows = scored_rows[:limit]

    examples = tuple(
        (row.ref, serialize(gold_predicates(row.mr), "concierge")) for row in shot_rows
    )
    summary = "functor require/2 over restaurant attribute slots"

    correct = 0
    per_slot: dict[str, SlotConfusion] = {}
    failures: list[dict] = []
    for row in scored_rows:
        gold = _normalized(gold_predicates(row.mr))
        req = UnderstandRequest(utterance=row.ref, ontology_summary=summary, examples=examples)
        raw = backend.understand_text(req)
        try:
            got = _normalized(parse_predicates(raw))
        except ParseError:
            got = frozenset()
        if got == gold:
            correct += 1
        elif len(failures) < max_failures:
            failures.append({"ref": row.ref, "expected": row.mr, "got": raw})
        _score_slots(per_slot, gold, got)

    evaluated = len(scored_rows)
    return AccuracyReport(
        accuracy=correct / evaluated if evaluated else 0.0,
        evaluated=evaluated,
        correct=correct,
        shots=shots,
        per_slot=per_slot,
        failures=failures,
    )


@dataclass(frozen=True)
class GoldEchoBackend:
    """Oracle mock: echoes the gold predicates for every known description."""

    by_ref: Mapping[str, str]

    @classmethod
    def for_dataset(cls, path: str | Path) -> "GoldEchoBackend":
        rows = load_dataset(path)
        return cls({row.ref: serialize(gold_predicates(row.mr), "concierge") for row in rows})

    def understand_text(self, req: UnderstandRequest) -> str:
        return self.by_ref.get(req.utterance, "")

    def realize_text(self, req) -> str:
        return "ok"


class EmptyBackend:
    """Adversarial mock: understands nothing."""

    def understand_text(self, req: UnderstandRequest) -> str:
        return ""

    def realize_text(self, req) -> str:
        return "ok"
