"""Seeded scheduler sweeps checked against the oracle.

Each record holds one scheduler run from a random joint strategy of one
generated instance, together with the calibrated step bound that governs it
and the oracle's opinion of the terminal state.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass

from .coalition import c_improve, has_unicolour_cycle
from .dynamics import bound_parameters, improve, step_bound
from .game import is_nash
from .graphs import classify
from .instances import GenParams, generate
from .oracle import enumerate_nash, enumerate_strong

SCHEDULED_REGIMES = (
    "dag",
    "cycle-two-bonus",
    "cycle-two-weight",
    "cycle-unweighted",
    "open-chain",
    "open-chain-weighted",
    "closed-chain",
    "pc-plain",
    "pc-bonus",
    "pc-weighted",
    "pc-weighted-bonus",
)

C_REGIMES = {
    "simple_cycle": ("cycle-two-bonus", "cycle-two-weight", "cycle-unweighted"),
    "closed_chain": ("closed-chain",),
    "open_chain": ("open-chain",),
}


@dataclass
class SweepRecord:
    regime: str
    seed: int
    num_nodes: int
    num_profiles: int
    kind: str
    steps: int
    bound: int
    verdict: str
    terminal_ok: bool  # is_nash (or strong) holds at the end
    in_oracle: bool  # terminal is among the oracle's equilibria
    coalition_steps: int = 0
    coalition_limit: int = 0
    witnesses_ok: bool = True

    @property
    def passed(self) -> bool:
        return self.terminal_ok and self.in_oracle and self.witnesses_ok

    @property
    def within_bound(self) -> bool:
        return self.steps <= self.bound

    def as_dict(self) -> dict:
        return asdict(self)


def random_start(game, seed: int) -> tuple[int, ...]:
    rng = random.Random(f"start:{seed}")
    return tuple(rng.choice(cs) for cs in game.colour_sets)


def sweep_regime(regime: str, seeds, params: GenParams | None = None) -> list[SweepRecord]:
    """Unilateral scheduler runs, one per seed."""
    params = params or GenParams()
    out = []
    for seed in seeds:
        game = generate(regime, seed, params).game
        payload = classify(game)
        kind, size = bound_parameters(game, payload)
        s0 = random_start(game, seed)
        trace = improve(game, s0, payload)
        final = trace.final
        out.append(SweepRecord(
            regime=regime,
            seed=seed,
            num_nodes=game.num_nodes,
            num_profiles=game.num_profiles,
            kind=kind,
            steps=len(trace),
            bound=step_bound(kind, **size),
            verdict=trace.verdict,
            terminal_ok=trace.verdict == "nash" and bool(is_nash(game, final)),
            in_oracle=final in enumerate_nash(game),
        ))
    return out


def sweep_c_regime(
    cls: str, seeds, params: GenParams | None = None, starts: str = "random"
) -> list[SweepRecord]:
    """c-improvement runs; regimes of a class are used in rotation.

    ``starts="random"`` gives one run per seed from a random joint strategy;
    ``starts="weak-nash"`` runs from every Nash state that is not strong, which
    is where coalition steps become necessary (possibly no run for a seed).
    """
    if starts not in ("random", "weak-nash"):
        raise ValueError("starts must be 'random' or 'weak-nash'")
    params = params or GenParams()
    regimes = C_REGIMES[cls]
    out = []
    for seed in seeds:
        regime = regimes[seed % len(regimes)]
        game = generate(regime, seed, params).game
        payload = classify(game)
        kind, size = bound_parameters(game, payload, coalitions=True)
        strong = enumerate_strong(game)
        if starts == "random":
            initial = [random_start(game, seed)]
        else:
            initial = sorted(enumerate_nash(game) - strong)
        limit = 1 if cls == "simple_cycle" else payload.m
        bound = step_bound(kind, **size) + (1 if kind == "cycle" else 0)
        for s0 in initial:
            trace = c_improve(game, s0, payload)
            multi = [st.deviation for st in trace.steps if len(st.deviation.coalition) > 1]
            out.append(SweepRecord(
                regime=regime,
                seed=seed,
                num_nodes=game.num_nodes,
                num_profiles=game.num_profiles,
                kind=kind,
                steps=len(trace),
                bound=bound,
                verdict=trace.verdict,
                terminal_ok=trace.verdict == "strong",
                in_oracle=trace.final in strong,
                coalition_steps=len(multi),
                coalition_limit=limit,
                witnesses_ok=len(multi) <= limit and all(has_unicolour_cycle(game, d) for d in multi),
            ))
    return out
