"""HTTP surface: session-oriented chat API under /v1/.

Bodies are JSON.  Engine errors map onto status codes: unknown session 404,
closed session 409, bad task/backend 422, language-model trouble 502/503
(with Retry-After where a retry can help).
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .config import AppConfig
from .nl.backend import BackendTimeoutError, BackendUnavailableError, UnparseableOutputError
from .sessions import BadTaskError, SessionStore, UnknownSessionError
from .state import StateClosedError, snapshot


class CreateSessionBody(BaseModel):
    task: str
    backend: str = "mock"
    seed: int | None = None


class MessageBody(BaseModel):
    text: str = Field(min_length=0, max_length=4000)


def create_app(config: AppConfig | None = None, web_dir: Path | None = None) -> FastAPI:
    config = config or AppConfig()
    store = SessionStore(config)
    app = FastAPI(title="symdial", version=__version__)
    app.state.store = store

    def _busy(err: Exception) -> JSONResponse:
        return JSONResponse(
            status_code=503,
            content={"detail": f"language backend unavailable: {err}"},
            headers={"Retry-After": "5"},
        )

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        try:
            session, opening = store.create(body.task, body.backend, body.seed)
        except BadTaskError as err:
            raise HTTPException(status_code=422, detail=str(err))
        except BackendTimeoutError as err:
            return _busy(err)
        except BackendUnavailableError as err:
            return _busy(err)
        return {
            "session_id": session.id,
            "task": session.task,
            "backend": session.backend_kind,
            "seed": session.seed,
            "opening": opening.to_dict() if opening else None,
            "state_digest": session.digest(),
        }

    @app.post("/v1/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody):
        try:
            result = store.post(session_id, body.text)
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")
        except StateClosedError:
            raise HTTPException(status_code=409, detail="session is closed")
        except BackendTimeoutError as err:
            return _busy(err)
        except BackendUnavailableError as err:
            return _busy(err)
        except UnparseableOutputError as err:
            raise HTTPException(status_code=502, detail=str(err))
        return result.to_dict()

    @app.get("/v1/sessions/{session_id}/transcript")
    def transcript(session_id: str):
        try:
            return {"session_id": session_id, "turns": store.transcript(session_id)}
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")

    @app.get("/v1/sessions/{session_id}/state")
    def state_debug(session_id: str):
        try:
            session = store.get(session_id)
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")
        return {
            "session_id": session_id,
            "task": session.task,
            "closed": session.closed,
            "state_digest": session.digest(),
            "state": snapshot(session.state),
        }

    if web_dir is not None and web_dir.exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=str(web_dir), html=True), name="webchat")

    return app
