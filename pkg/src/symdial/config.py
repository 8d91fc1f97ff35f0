"""Runtime configuration for the service and CLI.

Everything tunable lives in one YAML file (endpoint, model, jump
probability, data paths); the API credential itself only ever comes from an
environment variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .nl.backend import BackendConfig


@dataclass(frozen=True)
class AppConfig:
    data_dir: Path = Path("sessions")
    backend: BackendConfig = field(default_factory=BackendConfig)
    p_jump: float = 0.35
    context_turns: int = 4
    kb_path: Path | None = None  # None: packaged sample
    graph_path: Path | None = None


def load_config(path: str | Path) -> AppConfig:
    raw = yaml.safe_load(Path(path).read_text()) or {}
    backend_raw = raw.get("backend", {})
    backend = BackendConfig(
        kind=backend_raw.get("kind", "mock"),
        endpoint=backend_raw.get("endpoint", ""),
        model=backend_raw.get("model", ""),
        credential_env=backend_raw.get("credential_env", "SYMDIAL_API_KEY"),
        timeout=float(backend_raw.get("timeout", 30.0)),
        max_retries=int(backend_raw.get("max_retries", 2)),
    )
    return AppConfig(
        data_dir=Path(raw.get("data_dir", "sessions")),
        backend=backend,
        p_jump=float(raw.get("p_jump", 0.35)),
        context_turns=int(raw.get("context_turns", 4)),
        kb_path=Path(raw["kb_path"]) if raw.get("kb_path") else None,
        graph_path=Path(raw["graph_path"]) if raw.get("graph_path") else None,
    )
