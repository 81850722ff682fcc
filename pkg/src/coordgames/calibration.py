"""Empirical constants for the step bounds of every scheduler.

For each bound kind we run the scheduler from every joint strategy of a
fixed family of 50 seeded small generated instances (at most six nodes, at most three
colours), take the largest ratio of steps to the bound's shape, double it
and round up.  The family is deterministic, so rerunning reproduces the
shipped ``constants.json`` exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from pathlib import Path

from .coalition import c_improve_closed_chain, c_improve_open_chain
from .dynamics import (
    bound_parameters,
    bound_shape,
    improve_dag,
    improve_closed_chain,
    improve_open_chain,
    improve_partition_cycle,
    improve_simple_cycle,
)
from .graphs import classify
from .instances import GenParams, generate

VERSION = 1
MARGIN = 2


@dataclass(frozen=True)
class Family:
    kind: str
    regimes: tuple[str, ...]
    chain: bool = False
    seeds: int = 50


def family_params(chain: bool) -> tuple[GenParams, ...]:
    """Sparse and full colour sets, both within 3^6 joint strategies."""
    sizes = (3, 4) if chain else (3, 5)
    return tuple(
        GenParams(max_nodes=6, num_colours=3, density=d, max_profiles=729, cycle_sizes=sizes)
        for d in (0.6, 1.0)
    )


FAMILIES = (
    Family("dag", ("dag",)),
    Family("cycle", ("cycle-two-bonus", "cycle-two-weight", "cycle-unweighted")),
    Family("open_chain", ("open-chain",), chain=True),
    Family("weighted_open_chain", ("open-chain-weighted",), chain=True),
    Family("closed_chain", ("closed-chain",), chain=True),
    Family("partition_cycle", ("pc-plain", "pc-weighted")),
    Family("partition_cycle_bonus", ("pc-bonus", "pc-weighted-bonus")),
    Family("c_closed_chain", ("closed-chain",), chain=True),
    Family("c_open_chain", ("open-chain",), chain=True),
)


_RUNNERS = {
    "dag": improve_dag,
    "cycle": improve_simple_cycle,
    "open_chain": improve_open_chain,
    "weighted_open_chain": improve_open_chain,
    "closed_chain": improve_closed_chain,
    "partition_cycle": improve_partition_cycle,
    "partition_cycle_bonus": improve_partition_cycle,
    "c_closed_chain": c_improve_closed_chain,
    "c_open_chain": c_improve_open_chain,
}


def worst_ratio(family: Family) -> Fraction:
    run = _RUNNERS[family.kind]
    worst = Fraction(0)
    for regime, params in product(family.regimes, family_params(family.chain)):
        for seed in range(family.seeds):
            inst = generate(regime, seed, params)
            game = inst.game
            payload = classify(game)
            kind, size = bound_parameters(game, payload, coalitions=family.kind.startswith("c_"))
            if kind != family.kind:
                raise RuntimeError(f"{regime} seed {seed}: instance governed by {kind}, not {family.kind}")
            shape = bound_shape(kind, **size)
            for s0 in product(*game.colour_sets):
                trace = run(game, payload, s0, cap=False)
                if trace.verdict not in ("nash", "strong"):
                    raise RuntimeError(f"{regime} seed {seed}: scheduler ended with {trace.verdict}")
                worst = max(worst, Fraction(len(trace), max(1, shape)))
    return worst


def calibrate(families=FAMILIES, report=None) -> dict:
    """Worst ratios and constants; ``report(kind, ratio)`` is called per family."""
    ratios = {}
    for fam in families:
        ratios[fam.kind] = worst_ratio(fam)
        if report is not None:
            report(fam.kind, ratios[fam.kind])
    return {
        "version": VERSION,
        "margin": MARGIN,
        "worst_ratio": {k: str(r) for k, r in ratios.items()},
        "K": {k: max(1, math.ceil(MARGIN * r)) for k, r in ratios.items()},
    }


def write_constants(path: str | Path, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
