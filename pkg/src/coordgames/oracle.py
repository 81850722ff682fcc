"""Brute-force ground truth over the full joint-strategy space.

States are numbered in mixed radix: node i contributes ``index of s_i in
C(i)`` times the product of the set sizes of nodes after it, so state 0 is the
lowest-colour profile and enumeration order matches ``Game.profiles()``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components, dijkstra

from .dynamics import Trace
from .game import (
    DEFAULT_SIZE_BUDGET,
    Game,
    GameError,
    SizeLimitError,
    Strategy,
    apply_deviation,
    check_strategy,
    is_k_equilibrium,
    is_nash,
    payoffs,
    pruned_coalition_search,
)

FULL_MODE_BUDGET = 2**14


class StateSpace:
    """Dense payoff tables for every joint strategy of a small game."""

    def __init__(self, game: Game, budget: int = DEFAULT_SIZE_BUDGET):
        size = game.num_profiles
        if size > budget:
            raise SizeLimitError(f"{size} joint strategies exceed the budget of {budget}")
        self.game = game
        self.size = size
        n = game.num_nodes
        radix = [len(cs) for cs in game.colour_sets]
        stride = [1] * n
        for i in range(n - 2, -1, -1):
            stride[i] = stride[i + 1] * radix[i + 1]
        self.radix = np.array(radix, dtype=np.int64)
        self.stride = np.array(stride, dtype=np.int64)
        ids = np.arange(size, dtype=np.int64)
        self.digits = (ids[:, None] // self.stride[None, :]) % self.radix[None, :]
        lookup = [np.array(cs, dtype=np.int64) for cs in game.colour_sets]
        self.colours = np.stack([lookup[i][self.digits[:, i]] for i in range(n)], axis=1) if n else np.zeros((size, 0), np.int64)
        # alt[i][:, d] = payoff of node i for its d-th colour against the others' current colours
        self.alt = []
        for i in range(n):
            table = np.zeros((size, radix[i]), dtype=np.int64)
            for d, c in enumerate(game.colour_sets[i]):
                table[:, d] = game.bonus(i, c)
                for j, w in game.in_edges[i]:
                    table[:, d] += w * (self.colours[:, j] == c)
            self.alt.append(table)
        self.payoffs = np.stack(
            [self.alt[i][ids, self.digits[:, i]] for i in range(n)], axis=1
        )
        best = np.stack([self.alt[i].max(axis=1) for i in range(n)], axis=1)
        self.nash_mask = np.all(self.payoffs == best, axis=1)

    def index(self, s: Sequence[int]) -> int:
        pos = [self.game.colour_sets[i].index(c) for i, c in enumerate(s)]
        return int(np.dot(pos, self.stride))

    def strategy(self, idx: int) -> Strategy:
        return tuple(int(c) for c in self.colours[idx])

    def singleton_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """All profitable unilateral deviations as (source, target) index arrays."""
        src, dst = [], []
        ids = np.arange(self.size, dtype=np.int64)
        for i, table in enumerate(self.alt):
            cur = self.digits[:, i]
            for d in range(table.shape[1]):
                hit = (table[:, d] > self.payoffs[:, i]) & (cur != d)
                rows = ids[hit]
                src.append(rows)
                dst.append(rows + (d - cur[hit]) * self.stride[i])
        if not src:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        return np.concatenate(src), np.concatenate(dst)

    def profitable_targets(self, idx: int) -> np.ndarray:
        """Every state reachable from ``idx`` by one profitable coalition deviation."""
        moved = self.colours != self.colours[idx]
        better = self.payoffs > self.payoffs[idx]
        ok = np.all(better | ~moved, axis=1) & np.any(moved, axis=1)
        return np.flatnonzero(ok)

    def coalition_edges(self) -> tuple[np.ndarray, np.ndarray]:
        src, dst = [], []
        for idx in range(self.size):
            t = self.profitable_targets(idx)
            src.append(np.full(len(t), idx, dtype=np.int64))
            dst.append(t)
        return np.concatenate(src), np.concatenate(dst)


def enumerate_nash(game: Game, budget: int = DEFAULT_SIZE_BUDGET) -> set[Strategy]:
    space = StateSpace(game, budget)
    return {space.strategy(i) for i in np.flatnonzero(space.nash_mask)}


def enumerate_strong(
    game: Game, budget: int = DEFAULT_SIZE_BUDGET, pruned: bool = True
) -> set[Strategy]:
    """Strong equilibria; ``pruned=False`` scans every coalition deviation instead."""
    space = StateSpace(game, budget)
    out = set()
    for idx in np.flatnonzero(space.nash_mask):
        s = space.strategy(idx)
        if pruned:
            if pruned_coalition_search(game, s) is None:
                out.add(s)
        elif len(space.profitable_targets(idx)) == 0:
            out.add(s)
    return out


@dataclass
class StateGraphReport:
    """Reachability facts about the improvement (and optionally coalition) relation.

    ``has_fip``, ``weakly_acyclic`` and ``distance`` always refer to unilateral
    improvement steps.  In full mode the coalition relation is materialised as
    well and decides ``c_weakly_acyclic``.
    """

    num_states: int
    mode: str
    nash_states: set[Strategy]
    strong_states: set[Strategy]
    has_fip: bool
    weakly_acyclic: bool
    c_weakly_acyclic: bool | None
    distance: np.ndarray = field(repr=False)  # -1 where no Nash state is reachable
    space: StateSpace = field(repr=False)
    graph: csr_matrix = field(repr=False)
    c_graph: csr_matrix | None = field(default=None, repr=False)

    def shortest_path_len(self, s: Sequence[int]) -> float:
        d = int(self.distance[self.space.index(s)])
        return float("inf") if d < 0 else d

    def reachable(self, s: Sequence[int], coalitions: bool = False) -> set[Strategy]:
        graph = self.c_graph if coalitions else self.graph
        if graph is None:
            raise ValueError("coalition reachability needs a full-mode report")
        order = breadth_first_order(graph, self.space.index(s), directed=True,
                                    return_predecessors=False)
        return {self.space.strategy(int(i)) for i in order}

    def summary(self) -> dict:
        finite = self.distance[self.distance >= 0]
        return {
            "num_states": self.num_states,
            "mode": self.mode,
            "num_nash": len(self.nash_states),
            "num_strong": len(self.strong_states),
            "has_fip": self.has_fip,
            "weakly_acyclic": self.weakly_acyclic,
            "c_weakly_acyclic": self.c_weakly_acyclic,
            "max_shortest_path": int(finite.max()) if len(finite) else None,
            "unreachable_states": int((self.distance < 0).sum()),
        }


def _distances_to(graph: csr_matrix, sinks: np.ndarray) -> np.ndarray:
    """Length of the shortest path from every state into ``sinks`` (-1 if none)."""
    n = graph.shape[0]
    if len(sinks) == 0:
        return np.full(n, -1, dtype=np.int64)
    r, c = graph.nonzero()
    hub = n
    # reversed edges plus a hub pointing at every sink
    rows = np.concatenate([c, np.full(len(sinks), hub)])
    cols = np.concatenate([r, sinks])
    aug = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n + 1, n + 1))
    dist = dijkstra(aug, directed=True, indices=hub, unweighted=True)[:n]
    return np.where(np.isinf(dist), -1, dist - 1).astype(np.int64)


def _as_graph(n: int, src: np.ndarray, dst: np.ndarray) -> csr_matrix:
    g = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    g.sum_duplicates()
    return g


def build_state_graph(
    game: Game, coalition_mode: str = "singleton", budget: int | None = None
) -> StateGraphReport:
    if coalition_mode not in ("singleton", "full"):
        raise ValueError("coalition_mode must be 'singleton' or 'full'")
    if budget is None:
        budget = DEFAULT_SIZE_BUDGET if coalition_mode == "singleton" else FULL_MODE_BUDGET
    space = StateSpace(game, budget)
    n = space.size
    graph = _as_graph(n, *space.singleton_edges())
    ncomp, _ = connected_components(graph, directed=True, connection="strong")
    nash_idx = np.flatnonzero(space.nash_mask)
    dist = _distances_to(graph, nash_idx)
    c_graph = None
    c_weak = None
    if coalition_mode == "full":
        c_graph = _as_graph(n, *space.coalition_edges())
        sinks = np.flatnonzero(np.diff(c_graph.indptr) == 0)
        strong = {space.strategy(i) for i in sinks}
        c_weak = bool(np.all(_distances_to(c_graph, sinks) >= 0))
    else:
        strong = {
            space.strategy(i) for i in nash_idx
            if pruned_coalition_search(game, space.strategy(i)) is None
        }
    return StateGraphReport(
        num_states=n,
        mode=coalition_mode,
        nash_states={space.strategy(i) for i in nash_idx},
        strong_states=strong,
        has_fip=bool(ncomp == n),
        weakly_acyclic=bool(np.all(dist >= 0)),
        c_weakly_acyclic=c_weak,
        distance=dist,
        space=space,
        graph=graph,
        c_graph=c_graph,
    )


@dataclass(frozen=True)
class TraceVerdict:
    valid: bool
    index: int | None = None  # offending step; -1 for the initial state, len(steps) for the terminal claim
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


def verify_trace(game: Game, trace: Trace) -> TraceVerdict:
    """Replay ``trace`` and check every step and the terminal verdict."""
    try:
        check_strategy(game, trace.initial)
    except GameError as err:
        return TraceVerdict(False, -1, str(err))
    s = tuple(trace.initial)
    for k, st in enumerate(trace.steps):
        before = payoffs(game, s)
        try:
            s2, profitable = apply_deviation(game, s, st.deviation)
        except GameError as err:
            return TraceVerdict(False, k, str(err))
        if not profitable:
            return TraceVerdict(False, k, "deviation is not strictly profitable for every member")
        after = payoffs(game, s2)
        members = st.deviation.coalition
        if st.before and tuple(before[i] for i in members) != tuple(st.before):
            return TraceVerdict(False, k, "recorded payoffs before the step do not match")
        if st.after and tuple(after[i] for i in members) != tuple(st.after):
            return TraceVerdict(False, k, "recorded payoffs after the step do not match")
        s = s2
    end = len(trace.steps)
    if trace.verdict == "nash" and not is_nash(game, s):
        return TraceVerdict(False, end, "terminal state is not a Nash equilibrium")
    if trace.verdict == "strong" and not is_k_equilibrium(game, s, game.num_nodes):
        return TraceVerdict(False, end, "terminal state is not a strong equilibrium")
    if trace.verdict not in ("nash", "strong", "budget", "cycle-detected"):
        return TraceVerdict(False, end, f"unknown verdict {trace.verdict!r}")
    return TraceVerdict(True)
