import logging
import random
from pathlib import Path

import pytest
import yaml

from symdial.companion import NextBlock, ThemesBlock, opening_move, step
from symdial.state import DialogState
from symdial.terms import parse_predicate, parse_predicates
from symdial.topics import load_builtin_graph

TRACE = yaml.safe_load((Path(__file__).parent / "data" / "companion_trace.yaml").read_text())


@pytest.fixture(scope="module")
def graph():
    return load_builtin_graph()


def themes(text):
    return ThemesBlock(tuple(parse_predicates(text)))


def replay(graph, onto, seed=None):
    rng = random.Random(TRACE["seed"] if seed is None else seed)
    state = DialogState(session_id="golden")
    blocks = [opening_move(state, graph, rng, onto)]
    state = blocks[0][1]
    out = []
    for turn in TRACE["turns"]:
        block, state = step(state, themes(turn["themes"]), graph, rng, onto, utterance=turn["user"])
        out.append(block)
    return out, state


def test_first_turn_stays_on_user_focus(graph, companion_onto):
    rng = random.Random(TRACE["seed"])
    _, state = opening_move(DialogState(), graph, rng, companion_onto)
    block, _ = step(state, themes(TRACE["turns"][0]["themes"]), graph, rng, companion_onto)
    assert block.render() == "talk(movie,Inception,plot episode). attitude(positive)."


def test_quit_theme_yields_quit_block(graph, companion_onto):
    block, state = step(
        DialogState(), themes("quit."), graph, random.Random(0), companion_onto
    )
    assert block.quit and block.render() == "quit."
    assert state.quit


def test_golden_replay_matches_trace(graph, companion_onto):
    blocks, state = replay(graph, companion_onto)
    assert [b.render() for b in blocks] == [t["next"] for t in TRACE["turns"]]
    assert state.quit


def test_replay_jump_after_praise_goes_to_known_costar_movie(graph, companion_onto):
    blocks, _ = replay(graph, companion_onto)
    assert blocks[4].render() == "talk(movie,Don't Look Up,plot episode). attitude(positive)."


def test_every_next_block_parses_and_names_graph_entities(graph, companion_onto):
    blocks, _ = replay(graph, companion_onto)
    for block in blocks:
        preds = parse_predicates(block.render())
        assert preds == block.predicates()
        if not block.quit:
            talk = preds[0]
            assert talk.functor == "talk"
            assert talk.args[1] in graph


def test_themes_log_round_trips_verbatim(graph, companion_onto):
    from conftest import norm_block

    _, state = replay(graph, companion_onto)
    user_turns = [t for t in state.history if t.speaker == "user"]
    rendered = [ThemesBlock(t.predicates).render() for t in user_turns]
    expected = [norm_block(t["themes"], "companion") for t in TRACE["turns"]]
    assert rendered == expected


def test_unknown_entity_falls_back_to_last_known_concept(graph, companion_onto, caplog):
    rng = random.Random(TRACE["seed"])
    _, state = opening_move(DialogState(), graph, rng, companion_onto)
    block, state = step(state, themes(TRACE["turns"][0]["themes"]), graph, rng, companion_onto)
    with caplog.at_level(logging.WARNING):
        block, state = step(
            state,
            themes("talk(movie, Sharknado, plot episode). attitude(positive)."),
            graph,
            rng,
            companion_onto,
        )
    assert "Sharknado" in caplog.text
    assert not block.quit
    assert block.talk.args[1] == "Inception"
    # the unknown entity is remembered in the themes history all the same
    assert parse_predicate("talk(movie, Sharknado, plot episode)") in state.history[-1].predicates


def test_unknown_entity_on_first_turn_opens_at_root(graph, companion_onto):
    block, _ = step(
        DialogState(),
        themes("talk(movie, Sharknado, plot episode). attitude(positive)."),
        graph,
        random.Random(1),
        companion_onto,
    )
    assert block.talk.args[1] == "Inception"


def test_next_block_predicates_shape():
    block = NextBlock(talk=parse_predicate("talk(movie,Inception,plot episode)"), attitude="positive")
    assert block.render() == "talk(movie,Inception,plot episode). attitude(positive)."
