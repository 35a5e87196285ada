"""Issue-based dialogue engine for building terminology-constrained catalog queries."""

from .core import (
    Action,
    DialogueMove,
    InformationState,
    PredicateRegistry,
    PredicateSpec,
    Proposition,
    Question,
    resolves,
)
from .config import Runtime, RuntimeConfig, build_runtime
from .engine import Engine, EngineState
from .session import DialogueSession, replay
from .taskmodel import Query, Terminology

__all__ = [
    "Action",
    "DialogueMove",
    "DialogueSession",
    "Engine",
    "EngineState",
    "InformationState",
    "PredicateRegistry",
    "PredicateSpec",
    "Proposition",
    "Query",
    "Question",
    "Runtime",
    "RuntimeConfig",
    "Terminology",
    "build_runtime",
    "replay",
    "resolves",
]
