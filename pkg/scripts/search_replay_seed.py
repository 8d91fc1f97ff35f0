#!/usr/bin/env python3
"""Find rng seeds under which the companion engine reproduces the golden
small-talk conversation (tests/data/companion_trace.yaml) move for move.

The engine consumes randomness in a fixed order (one draw per turn for the
jump decision, one more to pick a jump target), so a single integer seed
scripts the whole conversation.  The first hit is frozen into the trace
fixture; re-run this after changing the sample graph or the jump logic.

Usage: python3 scripts/search_replay_seed.py [--limit 200000] [--all]
"""

import argparse
import random
import sys
from pathlib import Path

import yaml

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from symdial.companion import ThemesBlock, opening_move, step
from symdial.ontology import load_builtin_ontology
from symdial.state import DialogState
from symdial.terms import parse_predicates
from symdial.topics import load_builtin_graph


def load_trace():
    path = Path(__file__).resolve().parent.parent / "tests" / "data" / "companion_trace.yaml"
    return yaml.safe_load(path.read_text())


def replay_matches(seed: int, trace, graph, onto) -> bool:
    rng = random.Random(seed)
    state = DialogState(session_id="seed-search")
    _, state = opening_move(state, graph, rng, onto)
    for turn in trace["turns"]:
        themes = ThemesBlock(tuple(parse_predicates(turn["themes"])))
        block, state = step(state, themes, graph, rng, onto)
        if block.render() != turn["next"]:
            return False
    return True


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--limit", type=int, default=200000, help="seeds to try")
    parser.add_argument("--all", action="store_true", help="list every hit instead of stopping at the first")
    args = parser.parse_args()

    trace = load_trace()
    graph = load_builtin_graph()
    onto = load_builtin_ontology("companion")

    hits = []
    for seed in range(args.limit):
        if replay_matches(seed, trace, graph, onto):
            hits.append(seed)
            print(f"seed {seed} reproduces the trace")
            if not args.all:
                break
    if not hits:
        print(f"no seed in [0, {args.limit}) reproduces the trace", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
