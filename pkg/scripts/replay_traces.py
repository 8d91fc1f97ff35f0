#!/usr/bin/env python3
"""Replay both golden conversations end to end and print the annotated
transcripts (reply text plus themes/action predicate blocks per turn).

This is the human-readable version of what the acceptance suite asserts.

Usage: python3 scripts/replay_traces.py [--task concierge|companion|both]
"""

import argparse
import sys
import tempfile
from pathlib import Path

import yaml

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from symdial.config import AppConfig
from symdial.sessions import SessionStore
from symdial.state import constraint_block
from symdial.terms import serialize

CONCIERGE_TURNS = [
    "Hello!",
    "Can you recommend me a restaurant?",
    "I can try any food except curry.",
    "Less than fifteen dollars.",
    "No, I'm not looking for a specific rating score.",
    "Sounds nice. Can you give me its address?",
    "Thank you for your help.",
]


def banner(title):
    print("\n" + "=" * 72)
    print(title)
    print("=" * 72)


def replay_concierge(store):
    banner("restaurant concierge (mock backend)")
    session, _ = store.create("concierge", "mock", seed=0)
    for text in CONCIERGE_TURNS:
        result = store.post(session.id, text)
        print(f"\nuser> {text}")
        if result.themes:
            print("  [themes]")
            for line in result.themes.splitlines():
                print(f"    {line}")
        print("  [state]")
        for line in serialize(constraint_block(session.state), "concierge").splitlines():
            print(f"    {line}")
        print(f"  [action] {result.action}")
        print(f"bot> {result.reply}")


def replay_companion(store):
    banner("movie companion (mock backend, scripted seed)")
    trace = yaml.safe_load(
        (Path(__file__).resolve().parent.parent / "tests" / "data" / "companion_trace.yaml").read_text()
    )
    session, opening = store.create("companion", "mock", seed=trace["seed"])
    print(f"\n  [next] {opening.action}")
    print(f"bot> {opening.reply}")
    for turn in trace["turns"]:
        result = store.post(session.id, turn["user"])
        print(f"\nuser> {turn['user']}")
        print(f"  [themes] {result.themes}")
        print(f"  [next]   {result.action}")
        print(f"bot> {result.reply}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--task", choices=["concierge", "companion", "both"], default="both")
    args = parser.parse_args()
    store = SessionStore(AppConfig(data_dir=Path(tempfile.mkdtemp(prefix="symdial-replay-"))))
    if args.task in ("concierge", "both"):
        replay_concierge(store)
    if args.task in ("companion", "both"):
        replay_companion(store)


if __name__ == "__main__":
    main()
