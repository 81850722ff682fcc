"""Coordination games on directed graphs: equilibria, improvement paths, oracles."""

from .game import (
    Deviation,
    Game,
    GameError,
    MalformedDeviation,
    SizeLimitError,
    apply_deviation,
    best_responses,
    is_k_equilibrium,
    is_nash,
    is_strong,
    payoff,
    payoffs,
)
from .coalition import c_improve
from .dynamics import Trace, improve
from .graphs import classify
from .instances import generate, named_example
from .io import load_fixture, load_game
from .oracle import build_state_graph

__all__ = [
    "Deviation",
    "Trace",
    "build_state_graph",
    "c_improve",
    "classify",
    "generate",
    "improve",
    "load_fixture",
    "load_game",
    "named_example",
    "Game",
    "GameError",
    "MalformedDeviation",
    "SizeLimitError",
    "apply_deviation",
    "best_responses",
    "is_k_equilibrium",
    "is_nash",
    "is_strong",
    "payoff",
    "payoffs",
]
