"""Slot-filling decision unit: completeness and consistency checks over the
gathered constraints, and selection of exactly one next action.

The action precedence is fixed: farewell on quit, clarification on any
conflict, answering a pending detail query once an entity is in focus,
asking the first missing required slot, then recommending (or reporting
that nothing matches).  Everything here is a pure function of immutable
inputs, so sessions can be decided in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Protocol, Union

from .ontology import Ontology
from .state import DialogState, candidates, reset_slot, resolve_query, set_focus
from .terms import Predicate


@dataclass(frozen=True)
class CktSpec:
    """Template for one slot-filling task: what must be collected, in what order."""

    required: tuple[str, ...]  # priority order
    result_arity: int = 1
    clarification_policy: str = "reset"

    @classmethod
    def from_ontology(cls, onto: Ontology) -> "CktSpec":
        return cls(required=tuple(onto.required_slots()))


@dataclass(frozen=True)
class Conflict:
    slot: str
    sources: tuple[Predicate, ...]


@dataclass(frozen=True)
class Greeting:
    pass


@dataclass(frozen=True)
class AskSlot:
    slot: str


@dataclass(frozen=True)
class Recommend:
    entity: str
    facts: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class AnswerQuery:
    entity: str
    slot: str
    value: str | None  # None when the record has no such attribute


@dataclass(frozen=True)
class ReportNone:
    relax_hint: str | None = None


@dataclass(frozen=True)
class Clarify:
    conflicts: tuple[Conflict, ...]


@dataclass(frozen=True)
class Farewell:
    pass


Action = Union[Greeting, AskSlot, Recommend, AnswerQuery, ReportNone, Clarify, Farewell]


class TaskKnowledge(Protocol):
    """What the decision unit needs from a knowledge base."""

    def top_match(self, state: DialogState) -> str | None: ...

    def fact_sheet(self, entity: str) -> Mapping[str, str]: ...

    def detail(self, entity: str, slot: str) -> str | None: ...


def check_completeness(spec: CktSpec, state: DialogState) -> list[str]:
    """Required slots not yet addressed, in priority order."""
    return [slot for slot in spec.required if not state.addressed(slot)]


def check_consistency(state: DialogState, onto: Ontology) -> list[Conflict]:
    """One conflict per closed slot whose candidate set came up empty."""
    conflicts = []
    for schema in onto.slots:
        if schema.is_open:
            continue
        if not candidates(state, schema.name, onto):
            conflicts.append(Conflict(schema.name, state.constraint(schema.name).sources))
    return conflicts


def relaxation_hint(state: DialogState, onto: Ontology) -> str | None:
    """The least-constrained slot: the cheapest one for the user to loosen.

    Closed slots score by surviving fraction of their domain; open slots
    score 0.75 with only exclusions and 0.25 once pinned to specific values.
    Ties go to the later slot in declaration order.
    """
    best: tuple[float, int] | None = None
    hint = None
    for index, schema in enumerate(onto.slots):
        con = state.constraint(schema.name)
        if con.included is None and not con.excluded:
            continue
        if schema.is_open:
            score = 0.75 if con.included is None else 0.25
        else:
            score = len(candidates(state, schema.name, onto)) / len(schema.domain)
        if best is None or (score, index) > best:
            best = (score, index)
            hint = schema.name
    return hint


def next_action(spec: CktSpec, state: DialogState, kb: TaskKnowledge, onto: Ontology) -> Action:
    """Pick the single next action.  Pure: same inputs, same action."""
    if state.quit:
        return Farewell()
    conflicts = check_consistency(state, onto)
    if conflicts:
        return Clarify(tuple(conflicts))
    if state.focus is not None and state.pending_queries:
        slot = state.pending_queries[0]
        return AnswerQuery(state.focus, slot, kb.detail(state.focus, slot))
    missing = check_completeness(spec, state)
    if missing:
        return AskSlot(missing[0])
    entity = kb.top_match(state)
    if entity is not None:
        return Recommend(entity, kb.fact_sheet(entity))
    return ReportNone(relaxation_hint(state, onto))


def settle(state: DialogState, action: Action) -> DialogState:
    """Apply an action's side effects on the state.

    A recommendation puts its entity in focus and thereby answers the
    pending name query (plus any query its fact sheet covers); answering a
    detail query consumes it; clarification resets the conflicted slots so
    the next turn re-enters the normal flow.
    """
    if isinstance(action, Recommend):
        state = set_focus(state, action.entity)
        state = resolve_query(state, "name")
        for slot in action.facts:
            state = resolve_query(state, slot)
        return state
    if isinstance(action, AnswerQuery):
        return resolve_query(state, action.slot)
    if isinstance(action, Clarify):
        for conflict in action.conflicts:
            state = reset_slot(state, conflict.slot)
        return state
    return state


def action_predicates(action: Action) -> list[Predicate]:
    """Serialize an action into the predicate grammar for logs and prompts."""
    if isinstance(action, Greeting):
        return [Predicate("greet")]
    if isinstance(action, AskSlot):
        return [Predicate("ask", [action.slot])]
    if isinstance(action, Recommend):
        preds = [Predicate("recommend", [action.entity])]
        preds.extend(Predicate("has", [slot, value]) for slot, value in action.facts.items())
        return preds
    if isinstance(action, AnswerQuery):
        if action.value is None:
            return [Predicate("answer", [action.entity, action.slot])]
        return [Predicate("answer", [action.entity, action.slot, action.value])]
    if isinstance(action, ReportNone):
        preds = [Predicate("no_match")]
        if action.relax_hint:
            preds.append(Predicate("relax", [action.relax_hint]))
        return preds
    if isinstance(action, Clarify):
        return [Predicate("clarify", [c.slot]) for c in action.conflicts]
    if isinstance(action, Farewell):
        return [Predicate("farewell")]
    raise TypeError(f"unknown action {action!r}")
