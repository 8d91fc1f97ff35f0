"""Small-talk task: turns user theme predicates into the next talking point.

Each user turn arrives as a themes block (talk/content/attitude predicates,
possibly quit); the reply is a next block naming exactly one concept and
aspect plus an attitude echo, or quit.  Entities the user brings up that the
concept graph does not know trigger a graceful stay on the last known
concept rather than an error.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, replace

from .ontology import Ontology
from .state import DialogState, TopicState, update
from .terms import Predicate, serialize
from .topics import ConceptGraph, JumpConfig, NextMove, apply_move, next_move

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThemesBlock:
    predicates: tuple[Predicate, ...]

    @property
    def has_quit(self) -> bool:
        return any(p.functor == "quit" for p in self.predicates)

    def talks(self) -> list[Predicate]:
        return [p for p in self.predicates if p.functor == "talk"]

    def render(self) -> str:
        return serialize(self.predicates, "companion")


@dataclass(frozen=True)
class NextBlock:
    talk: Predicate | None = None
    attitude: str | None = None
    quit: bool = False

    def predicates(self) -> list[Predicate]:
        if self.quit:
            return [Predicate("quit")]
        return [self.talk, Predicate("attitude", [self.attitude])]

    def render(self) -> str:
        return serialize(self.predicates(), "companion")


def _block_for(move: NextMove) -> NextBlock:
    talk = Predicate("talk", [move.concept.category, move.concept.id, move.aspect])
    return NextBlock(talk=talk, attitude=move.attitude)


def _last_known_concept(topic: TopicState, graph: ConceptGraph):
    for concept_id in reversed(topic.visit_order):
        if concept_id in graph:
            return graph.get(concept_id)
    return None


def opening_move(state: DialogState, graph: ConceptGraph, rng: random.Random,
                 onto: Ontology, config: JumpConfig = JumpConfig()) -> tuple[NextBlock, DialogState]:
    """The session-start move: open on the graph's designated root concept."""
    move = next_move(graph, state.topic, rng, onto.aspects, config)
    state = replace(state, topic=apply_move(state.topic, move))
    return _block_for(move), state


def step(state: DialogState, themes: ThemesBlock, graph: ConceptGraph, rng: random.Random,
         onto: Ontology, config: JumpConfig = JumpConfig(), utterance: str = "") -> tuple[NextBlock, DialogState]:
    """Merge one themes block and decide the next block."""
    merged = update(state, themes.predicates, onto, utterance=utterance)
    if themes.has_quit:
        return NextBlock(quit=True), merged

    topic = merged.topic
    if topic.current is not None and topic.current[1] not in graph:
        unknown = topic.current[1]
        fallback = _last_known_concept(topic, graph)
        if fallback is None:
            move = next_move(graph, TopicState(), rng, onto.aspects, config)
        else:
            aspect = (topic.discussed_aspects(fallback.id) or ("",))[-1] \
                or onto.aspects.get(fallback.category, ("",))[0]
            move = NextMove("stay", fallback, aspect,
                            topic.attitudes.get(fallback.id) or topic.last_attitude or "positive")
        logger.warning("entity %r is not in the concept graph; staying on %r", unknown, move.concept.id)
    else:
        move = next_move(graph, topic, rng, onto.aspects, config)

    merged = replace(merged, topic=apply_move(topic, move))
    return _block_for(move), merged
