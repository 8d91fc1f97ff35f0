"""Task ontologies: the declared universe of functors, slots, and legal values.

An ontology loads from a ``format: 1`` YAML file (validated against
schemas/ontology.schema.json) and is immutable afterwards, so one instance
is safely shared across sessions.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

import jsonschema
import yaml

from .terms import Predicate

QUERY = "query"


class OntologyError(ValueError):
    """Ontology file violates the schema or an internal invariant."""


class UnknownSlotError(KeyError):
    pass


class OpenDomainError(ValueError):
    pass


@dataclass(frozen=True)
class SlotSchema:
    name: str
    domain: tuple[str, ...] | None = None  # None means open
    queryable: bool = False
    required: bool = False
    priority: int | None = None

    @property
    def is_open(self) -> bool:
        return self.domain is None


@dataclass(frozen=True)
class FunctorSpec:
    name: str
    arity: int
    kind: str  # constraint | topic | detail | attitude | control


@dataclass(frozen=True)
class Ontology:
    task: str
    functors: tuple[FunctorSpec, ...]
    slots: tuple[SlotSchema, ...] = ()
    categories: tuple[str, ...] = ()
    aspects: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    attitudes: tuple[str, ...] = ("positive", "negative")

    def slot(self, name: str) -> SlotSchema | None:
        for schema in self.slots:
            if schema.name == name:
                return schema
        return None

    def functor(self, name: str) -> FunctorSpec | None:
        for spec in self.functors:
            if spec.name == name:
                return spec
        return None

    def required_slots(self) -> list[str]:
        """Required slot names in ascending priority (asking) order."""
        required = [s for s in self.slots if s.required]
        return [s.name for s in sorted(required, key=lambda s: s.priority)]

    def all_aspects(self) -> set[str]:
        return {a for aspects in self.aspects.values() for a in aspects}


class Verdict(enum.Enum):
    OK = "OK"
    UNKNOWN_FUNCTOR = "UNKNOWN_FUNCTOR"
    ARITY_MISMATCH = "ARITY_MISMATCH"
    UNKNOWN_SLOT = "UNKNOWN_SLOT"
    VALUE_OUT_OF_DOMAIN = "VALUE_OUT_OF_DOMAIN"


@dataclass(frozen=True)
class Finding:
    predicate: Predicate
    verdict: Verdict
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return all(f.verdict is Verdict.OK for f in self.findings)

    @property
    def mergeable(self) -> bool:
        """True when the state tracker may merge: functors and arities all known."""
        return not any(
            f.verdict in (Verdict.UNKNOWN_FUNCTOR, Verdict.ARITY_MISMATCH) for f in self.findings
        )

    def problems(self) -> list[Finding]:
        return [f for f in self.findings if f.verdict is not Verdict.OK]

    def __str__(self) -> str:
        if self.ok:
            return "all predicates OK"
        return "; ".join(f"{f.predicate}: {f.verdict.value} {f.detail}".strip() for f in self.problems())


def _atom_or_none(value) -> str | None:
    return value if isinstance(value, str) else None


def _check_constraint(pred: Predicate, onto: Ontology) -> Finding:
    slot_name = _atom_or_none(pred.args[0])
    if slot_name is None:
        return Finding(pred, Verdict.UNKNOWN_SLOT, "slot name must be an atom")
    schema = onto.slot(slot_name)
    if schema is None:
        return Finding(pred, Verdict.UNKNOWN_SLOT, f"no slot named {slot_name!r}")
    values = pred.args[1]
    if not isinstance(values, tuple):
        return Finding(pred, Verdict.VALUE_OUT_OF_DOMAIN, "second argument must be a value list")
    atoms = [_atom_or_none(v) for v in values]
    if any(a is None for a in atoms):
        return Finding(pred, Verdict.VALUE_OUT_OF_DOMAIN, "values must be atoms")
    if pred.functor == "require" and tuple(atoms) == (QUERY,):
        if schema.queryable:
            return Finding(pred, Verdict.OK)
        return Finding(pred, Verdict.VALUE_OUT_OF_DOMAIN, f"slot {slot_name!r} is not queryable")
    if not schema.is_open:
        for atom in atoms:
            if atom not in schema.domain:
                return Finding(
                    pred, Verdict.VALUE_OUT_OF_DOMAIN, f"{atom!r} not in domain of {slot_name!r}"
                )
    return Finding(pred, Verdict.OK)


def _check_topic(pred: Predicate, onto: Ontology) -> Finding:
    category, entity, aspect = pred.args
    if not all(isinstance(a, str) for a in (category, entity, aspect)):
        return Finding(pred, Verdict.VALUE_OUT_OF_DOMAIN, "talk arguments must be atoms")
    if category not in onto.categories:
        return Finding(pred, Verdict.VALUE_OUT_OF_DOMAIN, f"unknown category {category!r}")
    if aspect not in onto.aspects.get(category, ()):
        return Finding(pred, Verdict.VALUE_OUT_OF_DOMAIN, f"{aspect!r} is not an aspect of {category!r}")
    return Finding(pred, Verdict.OK)


def validate(preds: Iterable[Predicate], onto: Ontology) -> ValidationReport:
    """Check every predicate against the ontology; one verdict per predicate."""
    findings: list[Finding] = []
    for pred in preds:
        spec = onto.functor(pred.functor)
        if spec is None:
            findings.append(Finding(pred, Verdict.UNKNOWN_FUNCTOR, f"no functor {pred.functor!r}"))
        elif pred.arity != spec.arity:
            findings.append(
                Finding(pred, Verdict.ARITY_MISMATCH, f"{pred.functor}/{spec.arity} got {pred.arity} args")
            )
        elif spec.kind == "constraint":
            findings.append(_check_constraint(pred, onto))
        elif spec.kind == "topic":
            findings.append(_check_topic(pred, onto))
        elif spec.kind == "detail":
            aspect = _atom_or_none(pred.args[0])
            if aspect is None or aspect not in onto.all_aspects():
                findings.append(Finding(pred, Verdict.VALUE_OUT_OF_DOMAIN, f"unknown aspect {aspect!r}"))
            else:
                findings.append(Finding(pred, Verdict.OK))
        elif spec.kind == "attitude":
            value = _atom_or_none(pred.args[0])
            if value in onto.attitudes:
                findings.append(Finding(pred, Verdict.OK))
            else:
                findings.append(Finding(pred, Verdict.VALUE_OUT_OF_DOMAIN, f"unknown attitude {value!r}"))
        else:  # control
            findings.append(Finding(pred, Verdict.OK))
    return ValidationReport(tuple(findings))


def full_domain(onto: Ontology, slot: str) -> tuple[str, ...]:
    """The closed domain of a slot, in declaration order."""
    schema = onto.slot(slot)
    if schema is None:
        raise UnknownSlotError(slot)
    if schema.is_open:
        raise OpenDomainError(f"slot {slot!r} has an open domain")
    return schema.domain


_SCHEMA = json.loads(resources.files("symdial").joinpath("schemas/ontology.schema.json").read_text())


def load_ontology(path: str | Path) -> Ontology:
    raw = yaml.safe_load(Path(path).read_text())
    try:
        jsonschema.validate(raw, _SCHEMA)
    except jsonschema.ValidationError as err:
        raise OntologyError(f"{path}: {err.message}") from err

    slots = []
    for entry in raw.get("slots", []):
        domain = entry["domain"]
        slots.append(
            SlotSchema(
                name=entry["name"],
                domain=None if domain == "open" else tuple(domain),
                queryable=entry.get("queryable", False),
                required=entry.get("required", False),
                priority=entry.get("priority"),
            )
        )
    functors = tuple(FunctorSpec(f["name"], f["arity"], f["kind"]) for f in raw["functors"])
    onto = Ontology(
        task=raw["task"],
        functors=functors,
        slots=tuple(slots),
        categories=tuple(raw.get("categories", [])),
        aspects={cat: tuple(aspects) for cat, aspects in raw.get("aspects", {}).items()},
        attitudes=tuple(raw.get("attitudes", ["positive", "negative"])),
    )
    _check_invariants(onto, path)
    return onto


def _check_invariants(onto: Ontology, path) -> None:
    seen = set()
    for slot in onto.slots:
        if slot.name in seen:
            raise OntologyError(f"{path}: duplicate slot {slot.name!r}")
        seen.add(slot.name)
        if slot.domain is not None and len(set(slot.domain)) != len(slot.domain):
            raise OntologyError(f"{path}: duplicate values in domain of {slot.name!r}")
        if slot.required and slot.priority is None:
            raise OntologyError(f"{path}: required slot {slot.name!r} has no priority")
    priorities = [s.priority for s in onto.slots if s.required]
    if len(set(priorities)) != len(priorities):
        raise OntologyError(f"{path}: required-slot priorities must be a total order")
    for category, aspects in onto.aspects.items():
        if len(set(aspects)) != len(aspects):
            raise OntologyError(f"{path}: duplicate aspects for {category!r}")


def builtin_data_path(name: str) -> Path:
    """Path of a data file shipped inside the package."""
    return Path(str(resources.files("symdial").joinpath("data").joinpath(name)))


def load_builtin_ontology(task: str) -> Ontology:
    return load_ontology(builtin_data_path(f"{task}.yaml"))
