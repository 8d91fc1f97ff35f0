"""Per-session dialogue state: merges each turn's predicates into constraints.

States are immutable; :func:`update` returns a new state.  Slot constraints
only tighten under update (monotone for closed slots), and a quit predicate
closes the state for good.  Contradictions are not resolved here: an empty
candidate set is surfaced to the decision engine, which owns the policy.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .ontology import QUERY, Ontology, UnknownSlotError, ValidationReport, validate
from .terms import Predicate, serialize_predicate


class StateClosedError(RuntimeError):
    """The session saw quit; no further merges are accepted."""


class ValidationFailedError(ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__(str(report))
        self.report = report


def _append_unique(values: tuple, new: Iterable) -> tuple:
    out = list(values)
    for v in new:
        if v not in out:
            out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class SlotConstraint:
    addressed: bool = False
    included: tuple[str, ...] | None = None  # insertion-ordered; None = unconstrained
    excluded: tuple[str, ...] = ()
    query_pending: bool = False
    sources: tuple[Predicate, ...] = ()  # constraint predicates applied, in arrival order

    def with_source(self, pred: Predicate) -> "SlotConstraint":
        return replace(self, addressed=True, sources=_append_unique(self.sources, [pred]))


@dataclass(frozen=True)
class OpenCandidates:
    """Constraint view for an open-domain slot: literal include/exclude sets."""

    included: frozenset[str] | None
    excluded: frozenset[str]

    def matches(self, value: str) -> bool:
        folded = value.casefold()
        if self.included is not None and folded not in {v.casefold() for v in self.included}:
            return False
        return folded not in {v.casefold() for v in self.excluded}


@dataclass(frozen=True)
class Turn:
    speaker: str  # "user" | "bot"
    text: str
    predicates: tuple[Predicate, ...]


@dataclass(frozen=True)
class TopicState:
    current: tuple[str, str, str] | None = None  # (category, entity, aspect)
    discussed: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    attitudes: Mapping[str, str] = field(default_factory=dict)
    last_attitude: str | None = None
    visit_order: tuple[str, ...] = ()
    fresh_content: bool = False  # last user turn engaged the current aspect

    def discussed_aspects(self, entity: str) -> tuple[str, ...]:
        return self.discussed.get(entity, ())

    def visited(self) -> set[str]:
        return set(self.visit_order)

    def last_visit_index(self, entity: str) -> int:
        for i in range(len(self.visit_order) - 1, -1, -1):
            if self.visit_order[i] == entity:
                return i
        return -1


@dataclass(frozen=True)
class DialogState:
    session_id: str = ""
    turn_index: int = 0
    slots: Mapping[str, SlotConstraint] = field(default_factory=dict)
    pending_queries: tuple[str, ...] = ()
    quit: bool = False
    focus: str | None = None  # entity a recommendation put in focus
    history: tuple[Turn, ...] = ()
    topic: TopicState = field(default_factory=TopicState)

    def constraint(self, slot: str) -> SlotConstraint:
        return self.slots.get(slot, SlotConstraint())

    def addressed(self, slot: str) -> bool:
        return self.constraint(slot).addressed


def _merge_constraint(con: SlotConstraint, pred: Predicate, domain: tuple[str, ...] | None,
                      pending: list[str], slot: str) -> SlotConstraint:
    values = tuple(pred.args[1])
    if pred.functor == "require":
        if values == (QUERY,):
            if slot not in pending:
                pending.append(slot)
            return replace(con.with_source(pred), query_pending=True)
        if domain is not None and set(values) == set(domain):
            # naming the whole domain means "no preference": address only
            return con.with_source(pred)
        intersected = values if con.included is None else tuple(v for v in con.included if v in values)
        return replace(con.with_source(pred), included=intersected)
    # not_require
    return replace(con.with_source(pred), excluded=_append_unique(con.excluded, values))


def _merge_topics(topic: TopicState, preds: list[Predicate], onto: Ontology) -> TopicState:
    current = topic.current
    discussed = {k: v for k, v in topic.discussed.items()}
    attitudes = dict(topic.attitudes)
    visit_order = list(topic.visit_order)
    last_attitude = topic.last_attitude
    group_entity = current[1] if current else None
    group_aspect = current[2] if current else None

    def mark(entity: str, aspect: str):
        discussed[entity] = _append_unique(discussed.get(entity, ()), [aspect])

    for pred in preds:
        kind = onto.functor(pred.functor).kind
        if kind == "topic":
            category, entity, aspect = pred.args
            mark(entity, aspect)
            current = (category, entity, aspect)
            group_entity, group_aspect = entity, aspect
            if not visit_order or visit_order[-1] != entity:
                visit_order.append(entity)
        elif kind == "detail" and group_entity is not None:
            mark(group_entity, pred.args[0])
        elif kind == "attitude":
            last_attitude = pred.args[0]
            if group_entity is not None:
                attitudes[group_entity] = pred.args[0]

    fresh = False
    if current is not None:
        _, entity, aspect = current
        for pred in preds:
            kind = onto.functor(pred.functor).kind
            if kind == "topic" and pred.args[1] == entity and pred.args[2] == aspect:
                fresh = True
            if kind == "detail" and pred.args[0] == aspect:
                fresh = True

    return TopicState(
        current=current,
        discussed=discussed,
        attitudes=attitudes,
        last_attitude=last_attitude,
        visit_order=tuple(visit_order),
        fresh_content=fresh,
    )


def update(state: DialogState, preds: Iterable[Predicate], onto: Ontology,
           utterance: str = "") -> DialogState:
    """Merge one user turn into the state.

    Raises :class:`StateClosedError` after quit and
    :class:`ValidationFailedError` when any predicate has an unknown functor
    or a wrong arity.  Constraints on unknown slots are kept in the history
    but not merged.
    """
    if state.quit:
        raise StateClosedError("session already closed by quit")
    preds = list(preds)
    report = validate(preds, onto)
    if not report.mergeable:
        raise ValidationFailedError(report)

    slots = dict(state.slots)
    pending = list(state.pending_queries)
    quit_seen = False
    topic_preds: list[Predicate] = []

    for pred in preds:
        kind = onto.functor(pred.functor).kind
        if kind == "constraint":
            slot_name = pred.args[0]
            schema = onto.slot(slot_name) if isinstance(slot_name, str) else None
            if schema is None:
                continue  # reported by validate; nothing to merge against
            slots[slot_name] = _merge_constraint(
                slots.get(slot_name, SlotConstraint()), pred, schema.domain, pending, slot_name
            )
        elif kind in ("topic", "detail", "attitude"):
            topic_preds.append(pred)
        elif kind == "control":
            quit_seen = True

    topic = _merge_topics(state.topic, topic_preds, onto) if topic_preds else replace(
        state.topic, fresh_content=False
    )

    return replace(
        state,
        turn_index=state.turn_index + 1,
        slots=slots,
        pending_queries=tuple(pending),
        quit=state.quit or quit_seen,
        history=state.history + (Turn("user", utterance, tuple(preds)),),
        topic=topic,
    )


def record_bot_turn(state: DialogState, text: str, preds: Iterable[Predicate] = ()) -> DialogState:
    return replace(state, history=state.history + (Turn("bot", text, tuple(preds)),))


def candidates(state: DialogState, slot: str, onto: Ontology):
    """Remaining legal values for a slot.

    Closed slots return a frozenset drawn from the domain; open slots return
    an :class:`OpenCandidates` constraint (no domain to complement against).
    """
    schema = onto.slot(slot)
    if schema is None:
        raise UnknownSlotError(slot)
    con = state.constraint(slot)
    if schema.is_open:
        return OpenCandidates(
            included=None if con.included is None else frozenset(con.included),
            excluded=frozenset(con.excluded),
        )
    return frozenset(
        v for v in schema.domain
        if (con.included is None or v in con.included) and v not in con.excluded
    )


def resolve_query(state: DialogState, slot: str) -> DialogState:
    """Consume a pending query once it has been answered."""
    if slot not in state.pending_queries:
        return state
    slots = dict(state.slots)
    if slot in slots:
        slots[slot] = replace(slots[slot], query_pending=False)
    return replace(
        state,
        slots=slots,
        pending_queries=tuple(s for s in state.pending_queries if s != slot),
    )


def set_focus(state: DialogState, entity: str) -> DialogState:
    return replace(state, focus=entity)


def reset_slot(state: DialogState, slot: str) -> DialogState:
    """Drop a slot's constraints entirely (clarification policy 'reset')."""
    slots = {k: v for k, v in state.slots.items() if k != slot}
    return replace(
        state,
        slots=slots,
        pending_queries=tuple(s for s in state.pending_queries if s != slot),
    )


def constraint_block(state: DialogState) -> list[Predicate]:
    """The accumulated constraint predicates, slots in first-mention order.

    Reconstructs the annotated cumulative state of a slot-filling session:
    every contributing predicate in arrival order, duplicates collapsed.
    """
    block: list[Predicate] = []
    for con in state.slots.values():
        for pred in con.sources:
            if pred not in block:
                block.append(pred)
    return block


def snapshot(state: DialogState) -> dict:
    """JSON-ready view of the state, used by the debug endpoint and digests."""
    return {
        "session_id": state.session_id,
        "turn_index": state.turn_index,
        "quit": state.quit,
        "focus": state.focus,
        "pending_queries": list(state.pending_queries),
        "slots": {
            name: {
                "addressed": con.addressed,
                "included": None if con.included is None else list(con.included),
                "excluded": list(con.excluded),
                "query_pending": con.query_pending,
                "sources": [serialize_predicate(p) for p in con.sources],
            }
            for name, con in sorted(state.slots.items())
        },
        "topic": {
            "current": list(state.topic.current) if state.topic.current else None,
            "discussed": {k: list(v) for k, v in sorted(state.topic.discussed.items())},
            "attitudes": dict(sorted(state.topic.attitudes.items())),
            "last_attitude": state.topic.last_attitude,
            "visit_order": list(state.topic.visit_order),
        },
        "history": [
            {"speaker": t.speaker, "text": t.text, "predicates": [serialize_predicate(p) for p in t.predicates]}
            for t in state.history
        ],
    }


def digest(state: DialogState) -> str:
    """Content hash of the state; identical conversations hash identically
    regardless of the (random) session id."""
    body = snapshot(state)
    body.pop("session_id")
    payload = json.dumps(body, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
