"""Session lifecycle: the understand -> update -> decide -> realize pipeline
plus crash-safe persistence.

Each session appends its turns to a JSONL event log; restoring a session
replays the logged themes through the (deterministic) engine, so crash
recovery and golden replays share one code path.  Stored replies are reused
during replay rather than re-realized, which keeps live-backend sessions
replayable without credentials.
"""

from __future__ import annotations

import hashlib
import json
import random
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from . import companion as companion_task
from . import policy
from .concierge import KnowledgeBase, load_kb
from .config import AppConfig
from .nl import (
    MockBackend,
    NlBackend,
    RealizeRequest,
    UnderstandRequest,
    context_window,
    ontology_summary,
    realize,
    understand,
)
from .nl.live import LiveBackend
from .ontology import Ontology, builtin_data_path, load_builtin_ontology
from .state import DialogState, StateClosedError, digest, record_bot_turn, update
from .terms import parse_predicates, serialize
from .topics import ConceptGraph, JumpConfig, load_builtin_graph, load_graph

TASKS = ("concierge", "companion")
BACKENDS = ("mock", "live")


class BadTaskError(ValueError):
    pass


class UnknownSessionError(KeyError):
    pass


@dataclass(frozen=True)
class TurnResult:
    reply: str
    themes: str
    action: str
    state_digest: str
    closed: bool

    def to_dict(self) -> dict:
        return {
            "reply": self.reply,
            "themes": self.themes,
            "action": self.action,
            "state_digest": self.state_digest,
            "closed": self.closed,
        }


class ConciergeRuntime:
    style = "concierge"
    persona = "concierge"

    def __init__(self, onto: Ontology, kb: KnowledgeBase):
        self.onto = onto
        self.kb = kb
        self.spec = policy.CktSpec.from_ontology(onto)

    def opening(self, state, rng):
        return None

    def respond(self, state: DialogState, preds, rng, utterance=""):
        state = update(state, preds, self.onto, utterance=utterance)
        if not preds and not state.quit and not state.pending_queries \
                and not any(c.addressed for c in state.slots.values()):
            action = policy.Greeting()
        else:
            action = policy.next_action(self.spec, state, self.kb, self.onto)
        state = policy.settle(state, action)
        return policy.action_predicates(action), {}, state

    def realize_context(self, action_preds):
        return {}


class CompanionRuntime:
    style = "companion"
    persona = "companion"

    def __init__(self, onto: Ontology, graph: ConceptGraph, jumps: JumpConfig):
        self.onto = onto
        self.graph = graph
        self.jumps = jumps

    def _context(self, block: companion_task.NextBlock) -> dict:
        if block.quit or block.talk is None:
            return {}
        entity, aspect = block.talk.args[1], block.talk.args[2]
        snippet = self.graph.get(entity).snippets.get(aspect, "") if entity in self.graph else ""
        return {"snippet": snippet} if snippet else {}

    def opening(self, state, rng):
        block, state = companion_task.opening_move(state, self.graph, rng, self.onto, self.jumps)
        return block.predicates(), self._context(block), state

    def respond(self, state: DialogState, preds, rng, utterance=""):
        themes = companion_task.ThemesBlock(tuple(preds))
        block, state = companion_task.step(
            state, themes, self.graph, rng, self.onto, self.jumps, utterance=utterance
        )
        return block.predicates(), self._context(block), state


def build_runtime(task: str, config: AppConfig):
    if task == "concierge":
        onto = load_builtin_ontology("concierge")
        kb = load_kb(config.kb_path or builtin_data_path("restaurants.csv"), onto)
        return ConciergeRuntime(onto, kb)
    if task == "companion":
        onto = load_builtin_ontology("companion")
        graph = load_graph(config.graph_path) if config.graph_path else load_builtin_graph()
        return CompanionRuntime(onto, graph, JumpConfig(p_jump=config.p_jump))
    raise BadTaskError(task)


def build_backend(kind: str, task: str, config: AppConfig) -> NlBackend:
    if kind == "mock":
        return MockBackend.builtin(task)
    if kind == "live":
        return LiveBackend(config.backend)
    raise BadTaskError(f"unknown backend {kind!r}")


def few_shot_examples(task: str, limit: int = 4) -> tuple[tuple[str, str], ...]:
    """Canonical utterance/predicates pairs, reused as live-backend shots."""
    mock = MockBackend.builtin(task)
    pairs = [(utt, preds) for utt, preds in mock.understand_table.items() if preds]
    return tuple(pairs[:limit])


@dataclass
class Session:
    id: str
    task: str
    backend_kind: str
    seed: int
    state: DialogState
    rng: random.Random
    created_at: float
    updated_at: float
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def closed(self) -> bool:
        return self.state.quit

    def digest(self) -> str:
        rng_state = json.dumps(self.rng.getstate())
        return hashlib.sha256((digest(self.state) + rng_state).encode()).hexdigest()


class SessionStore:
    """Multi-session engine front end with append-only JSONL persistence."""

    def __init__(self, config: AppConfig):
        self.config = config
        self.config.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._runtimes: dict[str, object] = {}
        self._backends: dict[tuple[str, str], NlBackend] = {}
        self._registry_lock = threading.Lock()

    # wiring caches

    def runtime(self, task: str):
        if task not in TASKS:
            raise BadTaskError(task)
        if task not in self._runtimes:
            self._runtimes[task] = build_runtime(task, self.config)
        return self._runtimes[task]

    def backend(self, kind: str, task: str) -> NlBackend:
        key = (kind, task)
        if key not in self._backends:
            self._backends[key] = build_backend(kind, task, self.config)
        return self._backends[key]

    # persistence

    def _log_path(self, session_id: str) -> Path:
        return self.config.data_dir / f"{session_id}.jsonl"

    def _append(self, session_id: str, event: dict) -> None:
        with open(self._log_path(session_id), "a") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")
            fh.flush()

    # lifecycle

    def create(self, task: str, backend_kind: str = "mock", seed: int | None = None) -> tuple[Session, TurnResult | None]:
        if task not in TASKS:
            raise BadTaskError(task)
        if backend_kind not in BACKENDS:
            raise BadTaskError(f"unknown backend {backend_kind!r}")
        self.backend(backend_kind, task)  # fail fast on misconfiguration
        session_id = uuid.uuid4().hex
        seed = random.randrange(2**31) if seed is None else seed
        now = time.time()
        session = Session(
            id=session_id,
            task=task,
            backend_kind=backend_kind,
            seed=seed,
            state=DialogState(session_id=session_id),
            rng=random.Random(seed),
            created_at=now,
            updated_at=now,
        )
        self._append(session_id, {
            "event": "created", "session": session_id, "task": task,
            "backend": backend_kind, "seed": seed, "ts": now,
        })
        opening = self._open(session)
        with self._registry_lock:
            self._sessions[session_id] = session
        return session, opening

    def _open(self, session: Session) -> TurnResult | None:
        runtime = self.runtime(session.task)
        opened = runtime.opening(session.state, session.rng)
        if opened is None:
            return None
        action_preds, context, state = opened
        backend = self.backend(session.backend_kind, session.task)
        reply = realize(backend, RealizeRequest(tuple(action_preds), f"{runtime.persona}.opening", context))
        session.state = record_bot_turn(state, reply, action_preds)
        result = TurnResult(
            reply=reply,
            themes="",
            action=serialize(action_preds, runtime.style),
            state_digest=session.digest(),
            closed=False,
        )
        self._append(session.id, {"event": "opening", "reply": reply,
                                  "action": result.action, "digest": result.state_digest})
        return result

    def get(self, session_id: str) -> Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is not None:
            return session
        session = self._restore(session_id)
        with self._registry_lock:
            return self._sessions.setdefault(session_id, session)

    def post(self, session_id: str, text: str) -> TurnResult:
        session = self.get(session_id)
        with session.lock:
            if session.closed:
                raise StateClosedError(session_id)
            result = self._run_turn(session, text)
            self._append(session.id, {
                "event": "turn", "text": text, "themes": result.themes,
                "action": result.action, "reply": result.reply, "digest": result.state_digest,
            })
            session.updated_at = time.time()
            return result

    def _run_turn(self, session: Session, text: str, *, themes_override: str | None = None,
                  reply_override: str | None = None) -> TurnResult:
        runtime = self.runtime(session.task)
        backend = self.backend(session.backend_kind, session.task)

        if themes_override is None:
            pairs = [(t.speaker, t.text) for t in session.state.history]
            req = UnderstandRequest(
                utterance=text,
                context=context_window(pairs, self.config.context_turns),
                ontology_summary=ontology_summary(runtime.onto),
                examples=few_shot_examples(session.task),
            )
            preds = understand(backend, req, runtime.onto)
        else:
            preds = parse_predicates(themes_override)

        action_preds, context, state = runtime.respond(session.state, preds, session.rng, utterance=text)
        if reply_override is None:
            reply = realize(backend, RealizeRequest(tuple(action_preds), runtime.persona, context))
        else:
            reply = reply_override
        session.state = record_bot_turn(state, reply, action_preds)
        return TurnResult(
            reply=reply,
            themes=serialize(list(preds), runtime.style),
            action=serialize(action_preds, runtime.style),
            state_digest=session.digest(),
            closed=session.closed,
        )

    def _restore(self, session_id: str) -> Session:
        """Rebuild a session by replaying its event log."""
        path = self._log_path(session_id)
        if not path.exists():
            raise UnknownSessionError(session_id)
        events = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
        if not events or events[0].get("event") != "created":
            raise UnknownSessionError(f"{session_id}: corrupt event log")
        head = events[0]
        session = Session(
            id=session_id,
            task=head["task"],
            backend_kind=head["backend"],
            seed=head["seed"],
            state=DialogState(session_id=session_id),
            rng=random.Random(head["seed"]),
            created_at=head["ts"],
            updated_at=head["ts"],
        )
        runtime = self.runtime(session.task)
        for event in events[1:]:
            if event["event"] == "opening":
                opened = runtime.opening(session.state, session.rng)
                action_preds, _, state = opened
                session.state = record_bot_turn(state, event["reply"], action_preds)
            elif event["event"] == "turn":
                self._run_turn(session, event["text"],
                               themes_override=event["themes"], reply_override=event["reply"])
        return session

    def transcript(self, session_id: str) -> list[dict]:
        session = self.get(session_id)
        return [
            {
                "speaker": turn.speaker,
                "text": turn.text,
                "predicates": serialize(list(turn.predicates), self.runtime(session.task).style),
            }
            for turn in session.state.history
        ]
