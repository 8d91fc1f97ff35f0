from .backend import (
    BackendConfig,
    BackendTimeoutError,
    BackendUnavailableError,
    NlBackend,
    RealizeRequest,
    UnderstandRequest,
    UnparseableOutputError,
    context_window,
    ontology_summary,
    realize,
    understand,
)
from .evaluate import AccuracyReport, EmptyBackend, GoldEchoBackend, evaluate_parsing
from .live import LiveBackend
from .mock import MockBackend

__all__ = [
    "AccuracyReport",
    "BackendConfig",
    "BackendTimeoutError",
    "BackendUnavailableError",
    "EmptyBackend",
    "GoldEchoBackend",
    "LiveBackend",
    "MockBackend",
    "NlBackend",
    "RealizeRequest",
    "UnderstandRequest",
    "UnparseableOutputError",
    "context_window",
    "evaluate_parsing",
    "ontology_summary",
    "realize",
    "understand",
]
