import json
import threading

import pytest
from fastapi.testclient import TestClient

from symdial.config import AppConfig
from symdial.service import create_app
from symdial.sessions import SessionStore
from symdial.terms import parse_predicates

CONCIERGE_SCRIPT = [
    "Hello!",
    "Can you recommend me a restaurant?",
    "I can try any food except curry.",
    "Less than fifteen dollars.",
    "No, I'm not looking for a specific rating score.",
    "Sounds nice. Can you give me its address?",
    "Thank you for your help.",
]


@pytest.fixture()
def client(tmp_path):
    app = create_app(AppConfig(data_dir=tmp_path / "sessions"))
    return TestClient(app)


def create_session(client, task="concierge", backend="mock", seed=None):
    body = {"task": task, "backend": backend}
    if seed is not None:
        body["seed"] = seed
    response = client.post("/v1/sessions", json=body)
    assert response.status_code == 201, response.text
    return response.json()


def test_health(client):
    response = client.get("/v1/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_create_unknown_task_is_422(client):
    assert client.post("/v1/sessions", json={"task": "barista"}).status_code == 422
    assert client.post("/v1/sessions", json={"task": "concierge", "backend": "psychic"}).status_code == 422


def test_first_concierge_turn_matches_annotation(client):
    session = create_session(client)
    assert session["opening"] is None
    response = client.post(
        f"/v1/sessions/{session['session_id']}/messages",
        json={"text": "Can you recommend me a restaurant?"},
    )
    body = response.json()
    assert parse_predicates(body["themes"]) == parse_predicates(
        "require('name',['query']),\nrequire('establishment',['restaurant'])"
    )
    assert body["action"] == "ask('food type')"
    assert "food" in body["reply"]


def test_full_concierge_conversation_ends_with_farewell(client):
    session = create_session(client)
    sid = session["session_id"]
    results = [client.post(f"/v1/sessions/{sid}/messages", json={"text": t}).json() for t in CONCIERGE_SCRIPT]
    assert results[0]["action"] == "greet"
    assert results[-1]["action"] == "farewell"
    assert results[-1]["closed"] is True
    assert "Southern Recipes Grill" in results[4]["reply"]
    assert "621 W Plano Pkwy #229, Plano, TX 75075" in results[5]["reply"]
    # every predicate field parses
    for result in results:
        parse_predicates(result["themes"])
        parse_predicates(result["action"])

    follow_up = client.post(f"/v1/sessions/{sid}/messages", json={"text": "one more thing"})
    assert follow_up.status_code == 409


def test_companion_session_emits_opening_block(client):
    session = create_session(client, task="companion", seed=7)
    opening = session["opening"]
    assert opening is not None
    preds = parse_predicates(opening["action"])
    assert preds[0].functor == "talk"
    assert preds[0].args[1] == "Inception"
    assert "Inception" in opening["reply"]
    # seeded determinism: identical seed, identical opening
    again = create_session(client, task="companion", seed=7)
    assert again["opening"]["action"] == opening["action"]
    assert again["opening"]["reply"] == opening["reply"]


def test_unknown_session_is_404(client):
    assert client.post("/v1/sessions/feedbeef/messages", json={"text": "hi"}).status_code == 404
    assert client.get("/v1/sessions/feedbeef/transcript").status_code == 404


def test_transcript_and_state_debug(client):
    session = create_session(client)
    sid = session["session_id"]
    client.post(f"/v1/sessions/{sid}/messages", json={"text": "Less than fifteen dollars."})
    transcript = client.get(f"/v1/sessions/{sid}/transcript").json()["turns"]
    assert [t["speaker"] for t in transcript] == ["user", "bot"]
    assert transcript[0]["text"] == "Less than fifteen dollars."
    state = client.get(f"/v1/sessions/{sid}/state").json()
    assert state["state"]["slots"]["price range"]["included"] == ["cheap"]
    assert state["state_digest"]


def test_crash_replay_restores_identical_digest(tmp_path, concierge_onto):
    config = AppConfig(data_dir=tmp_path / "sessions")
    store = SessionStore(config)
    session, _ = store.create("concierge", "mock", seed=5)
    for text in CONCIERGE_SCRIPT[:4]:
        store.post(session.id, text)
    before = session.digest()

    resurrected = SessionStore(config)  # same directory, fresh process state
    restored = resurrected.get(session.id)
    assert restored.digest() == before
    # and the conversation continues from where it stopped
    result = resurrected.post(session.id, CONCIERGE_SCRIPT[4])
    assert "customer rating" in result.themes


def test_crash_replay_companion_mid_conversation(tmp_path):
    config = AppConfig(data_dir=tmp_path / "sessions")
    store = SessionStore(config)
    session, _ = store.create("companion", "mock", seed=1989)
    store.post(session.id, "Me too! I just saw Inception. It is a great idea to take action on one's dream! Dreams in the dreams! What a fabulous idea!")
    before = session.digest()

    resurrected = SessionStore(config)
    assert resurrected.get(session.id).digest() == before


def test_two_identical_runs_produce_identical_transcripts(tmp_path):
    digests = []
    transcripts = []
    for run in ("a", "b"):
        store = SessionStore(AppConfig(data_dir=tmp_path / run))
        session, _ = store.create("companion", "mock", seed=1989)
        last = None
        for text in ["Hello!", "I need to go now."]:
            last = store.post(session.id, text)
        digests.append(last.state_digest)
        transcripts.append(store.transcript(session.id))
    assert digests[0] == digests[1]
    assert transcripts[0] == transcripts[1]


def test_concurrent_posts_to_one_session_are_serialized(tmp_path):
    store = SessionStore(AppConfig(data_dir=tmp_path / "sessions"))
    session, _ = store.create("concierge", "mock", seed=3)
    errors = []

    def worker(text):
        try:
            store.post(session.id, text)
        except Exception as err:  # noqa: BLE001 - collected for the assertion
            errors.append(err)

    threads = [threading.Thread(target=worker, args=(f"message {i}",)) for i in range(8)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()
    assert not errors
    assert session.state.turn_index == 8
    log_lines = (store.config.data_dir / f"{session.id}.jsonl").read_text().splitlines()
    assert len([l for l in log_lines if json.loads(l)["event"] == "turn"]) == 8


def test_distinct_sessions_are_independent(tmp_path):
    store = SessionStore(AppConfig(data_dir=tmp_path / "sessions"))
    a, _ = store.create("concierge", "mock", seed=1)
    b, _ = store.create("concierge", "mock", seed=1)
    store.post(a.id, "Less than fifteen dollars.")
    assert b.state.turn_index == 0
    assert a.state.turn_index == 1
