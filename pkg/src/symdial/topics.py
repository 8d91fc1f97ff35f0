"""Topic-graph navigation for aimless small talk.

A conversation either stays on the current concept/aspect, shifts to a
fresh aspect of the same concept, or jumps to a related concept.  Jumps go
to a graph neighbor, where two content nodes that share a person (an actor,
a director, an author) count as related through that person.  A seeded rng
decides when to jump, so whole conversations replay deterministically.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

import jsonschema
import yaml

from .state import TopicState

CONTENT_CATEGORIES = ("movie", "book")


class GraphFormatError(ValueError):
    pass


class EmptyGraphError(ValueError):
    pass


class UnknownConceptError(KeyError):
    pass


@dataclass(frozen=True)
class Concept:
    id: str
    category: str
    attributes: Mapping[str, str] = field(default_factory=dict)
    snippets: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Edge:
    source: str
    relation: str
    target: str


@dataclass(frozen=True)
class ConceptGraph:
    nodes: Mapping[str, Concept]
    edges: tuple[Edge, ...]
    root: str

    def get(self, concept_id: str) -> Concept:
        try:
            return self.nodes[concept_id]
        except KeyError:
            raise UnknownConceptError(concept_id) from None

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.nodes


@dataclass(frozen=True)
class JumpConfig:
    """Knobs for the jump behavior; fixed per session."""

    p_jump: float = 0.35


@dataclass(frozen=True)
class NextMove:
    kind: str  # "stay" | "shift" | "jump"
    concept: Concept
    aspect: str
    attitude: str
    link: tuple[Edge, ...] = ()  # the connection used by a jump; empty at session start


def neighbors(graph: ConceptGraph, concept_id: str) -> list[tuple[str, Concept]]:
    """All incident edges of a concept, ordered by (relation, other id)."""
    node = graph.get(concept_id)
    out = []
    for edge in graph.edges:
        if edge.source == node.id:
            out.append((edge.relation, graph.get(edge.target)))
        elif edge.target == node.id:
            out.append((edge.relation, graph.get(edge.source)))
    return sorted(out, key=lambda pair: (pair[0], pair[1].id))


def _edge_between(graph: ConceptGraph, a: str, b: str, relation: str) -> Edge:
    for edge in graph.edges:
        if edge.relation == relation and {edge.source, edge.target} == {a, b}:
            return edge
    raise UnknownConceptError(f"no {relation} edge between {a!r} and {b!r}")


def jump_candidates(graph: ConceptGraph, concept_id: str) -> list[tuple[tuple[Edge, ...], Concept]]:
    """Related concepts a jump may target, with the connecting edge path.

    Direct neighbors come first; then content nodes one hop away through a
    shared person node (the person is part of the carried link, so the
    realizer can name the connection).  Deterministic order, first link wins
    on duplicates.
    """
    seen: set[str] = {concept_id}
    out: list[tuple[tuple[Edge, ...], Concept]] = []
    direct = neighbors(graph, concept_id)
    for relation, node in direct:
        if node.id in seen:
            continue
        seen.add(node.id)
        out.append(((_edge_between(graph, concept_id, node.id, relation),), node))
    for relation, person in sorted(direct, key=lambda pair: pair[1].id):
        if person.category != "person":
            continue
        first_hop = _edge_between(graph, concept_id, person.id, relation)
        for relation2, node in neighbors(graph, person.id):
            if node.id in seen or node.category == "person":
                continue
            seen.add(node.id)
            out.append(((first_hop, _edge_between(graph, person.id, node.id, relation2)), node))
    return out


def _undiscussed(topic: TopicState, concept: Concept, aspects: Mapping[str, tuple[str, ...]]) -> list[str]:
    catalog = aspects.get(concept.category, ())
    done = topic.discussed_aspects(concept.id)
    return [a for a in catalog if a not in done]


def _attitude_for(topic: TopicState, concept_id: str) -> str:
    return topic.attitudes.get(concept_id) or topic.last_attitude or "positive"


def _opening_aspect(topic: TopicState, concept: Concept, aspects) -> str:
    fresh = _undiscussed(topic, concept, aspects)
    if fresh:
        return fresh[0]
    catalog = aspects.get(concept.category, ())
    return catalog[0] if catalog else ""


def next_move(graph: ConceptGraph, topic: TopicState, rng: random.Random,
              aspects: Mapping[str, tuple[str, ...]], config: JumpConfig = JumpConfig()) -> NextMove:
    """Pick the next talking point.

    Draw order is fixed: one uniform draw decides jumping whenever a current
    concept exists, and a jump draws once more to choose its target, so a
    seed fully determines a conversation.
    """
    if not graph.nodes:
        raise EmptyGraphError("concept graph has no nodes")

    if topic.current is None:
        root = graph.get(graph.root)
        return NextMove("jump", root, _opening_aspect(topic, root, aspects), _attitude_for(topic, root.id))

    _, entity, aspect = topic.current
    concept = graph.get(entity)
    undiscussed = _undiscussed(topic, concept, aspects)
    roll = rng.random()

    if roll < config.p_jump or not undiscussed:
        candidates = jump_candidates(graph, concept.id)
        if candidates:
            visited = topic.visited()
            unvisited = [(link, node) for link, node in candidates if node.id not in visited]
            if unvisited:
                link, target = unvisited[rng.randrange(len(unvisited))]
            else:
                link, target = min(
                    candidates, key=lambda lt: (topic.last_visit_index(lt[1].id), lt[1].id)
                )
            return NextMove(
                "jump", target, _opening_aspect(topic, target, aspects), _attitude_for(topic, target.id), link
            )
        # nowhere to go: a single-concept graph keeps the last aspect alive
        if not undiscussed:
            return NextMove("stay", concept, aspect, _attitude_for(topic, concept.id))

    if topic.fresh_content:
        return NextMove("stay", concept, aspect, _attitude_for(topic, concept.id))
    return NextMove("shift", concept, undiscussed[0], _attitude_for(topic, concept.id))


def apply_move(topic: TopicState, move: NextMove) -> TopicState:
    """Bookkeeping after the engine commits to a move."""
    discussed = {k: v for k, v in topic.discussed.items()}
    already = discussed.get(move.concept.id, ())
    if move.aspect and move.aspect not in already:
        discussed[move.concept.id] = already + (move.aspect,)
    visit_order = list(topic.visit_order)
    if not visit_order or visit_order[-1] != move.concept.id:
        visit_order.append(move.concept.id)
    return TopicState(
        current=(move.concept.category, move.concept.id, move.aspect),
        discussed=discussed,
        attitudes=dict(topic.attitudes),
        last_attitude=topic.last_attitude,
        visit_order=tuple(visit_order),
        fresh_content=False,
    )


_SCHEMA = json.loads(resources.files("symdial").joinpath("schemas/graph.schema.json").read_text())


def load_graph(path: str | Path) -> ConceptGraph:
    raw = yaml.safe_load(Path(path).read_text())
    try:
        jsonschema.validate(raw, _SCHEMA)
    except jsonschema.ValidationError as err:
        raise GraphFormatError(f"{path}: {err.message}") from err

    nodes: dict[str, Concept] = {}
    for entry in raw["nodes"]:
        if entry["id"] in nodes:
            raise GraphFormatError(f"{path}: duplicate node {entry['id']!r}")
        concept = Concept(
            id=entry["id"],
            category=entry["category"],
            attributes=dict(entry.get("attributes", {})),
            snippets=dict(entry.get("snippets", {})),
        )
        if concept.category in CONTENT_CATEGORIES and not concept.snippets:
            raise GraphFormatError(f"{path}: {concept.id!r} needs at least one aspect snippet")
        nodes[concept.id] = concept

    edges = []
    for entry in raw["edges"]:
        if entry["from"] == entry["to"]:
            raise GraphFormatError(f"{path}: self-loop on {entry['from']!r}")
        for endpoint in (entry["from"], entry["to"]):
            if endpoint not in nodes:
                raise GraphFormatError(f"{path}: edge endpoint {endpoint!r} is not a node")
        edges.append(Edge(entry["from"], entry["relation"], entry["to"]))

    if raw["root"] not in nodes:
        raise GraphFormatError(f"{path}: root {raw['root']!r} is not a node")
    return ConceptGraph(nodes=nodes, edges=tuple(edges), root=raw["root"])


def load_builtin_graph() -> ConceptGraph:
    return load_graph(Path(str(resources.files("symdial").joinpath("data/graph.yaml"))))
