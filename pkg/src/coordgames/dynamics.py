"""Improvement-path schedulers and random best-response dynamics.

Every scheduler works on one mutable strategy owned by a :class:`_Run`,
records each profitable unilateral step and returns a :class:`Trace`.
Runs are capped at ten times the calibrated step bound of their class so a
scheduler defect shows up as a ``budget`` verdict instead of a hang.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Callable, Sequence

from .game import (
    Deviation,
    Game,
    GameError,
    Strategy,
    check_strategy,
    colour_payoff,
    improving_colours,
    is_best_response,
    is_nash,
)
from .graphs import (
    Chain,
    Dag,
    PartitionCycle,
    SimpleCycle,
    UnsupportedWeight,
    classify,
    split_weighted_cross_edges,
)

VERDICTS = ("nash", "strong", "budget", "cycle-detected")
CAP_FACTOR = 10


class NotGuaranteed(GameError):
    """No improvement path is promised for this instance shape."""

    def __init__(self, message: str, citation: str):
        super().__init__(f"{message} ({citation})")
        self.citation = citation


class TieContextError(GameError):
    pass


class TieBreak(Enum):
    PREFER_CURRENT = "prefer-current"
    PREFER_PREDECESSOR = "prefer-predecessor"
    P1 = "p1"
    P2 = "p2"
    P3 = "p3"
    LOWEST = "lowest"


@dataclass(frozen=True)
class TieContext:
    """Partition-cycle facts a tie policy may need about the node being updated."""

    predecessor: int | None
    top_preds: tuple[int, ...] = ()  # V_T nodes with a cross edge into this node


@dataclass(frozen=True)
class Step:
    deviation: Deviation
    before: tuple[int, ...]  # payoff of each coalition member before the move
    after: tuple[int, ...]


@dataclass
class Trace:
    initial: Strategy
    steps: list[Step] = field(default_factory=list)
    verdict: str = "nash"
    measures: dict[str, list] = field(default_factory=dict)

    @property
    def final(self) -> Strategy:
        s = list(self.initial)
        for st in self.steps:
            for i, c in st.deviation.moves:
                s[i] = c
        return tuple(s)

    def __len__(self) -> int:
        return len(self.steps)

    def coalition_steps(self) -> list[Step]:
        return [st for st in self.steps if len(st.deviation) > 1]

    def to_dict(self, game: Game | None = None) -> dict:
        def colour(c: int):
            return game.colour_names[c] if game is not None else c

        return {
            "format": "coordgames-trace/1",
            "initial": [colour(c) for c in self.initial],
            "steps": [
                {
                    "coalition": list(st.deviation.coalition),
                    "colours": [colour(c) for _, c in st.deviation.moves],
                    "before": list(st.before),
                    "after": list(st.after),
                }
                for st in self.steps
            ],
            "verdict": self.verdict,
            "num_steps": len(self.steps),
            "measures": self.measures,
        }

    @classmethod
    def from_dict(cls, data: dict, game: Game | None = None) -> "Trace":
        def colour(c):
            return game.colour_id(c) if isinstance(c, str) and game is not None else c

        steps = [
            Step(
                Deviation.of(zip(st["coalition"], (colour(c) for c in st["colours"]))),
                tuple(st.get("before", ())),
                tuple(st.get("after", ())),
            )
            for st in data["steps"]
        ]
        return cls(
            tuple(colour(c) for c in data["initial"]),
            steps,
            data.get("verdict", "nash"),
            dict(data.get("measures", {})),
        )


# -- bound constants ----------------------------------------------------------


def load_constants(path: str | None = None) -> dict[str, float]:
    if path is None:
        text = resources.files("coordgames").joinpath("constants.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return json.loads(text)["K"]


_CONSTANTS: dict[str, float] | None = None


def constants() -> dict[str, float]:
    global _CONSTANTS
    if _CONSTANTS is None:
        _CONSTANTS = load_constants()
    return _CONSTANTS


def bound_shape(kind: str, **size: int) -> int:
    """The asymptotic step bound of a regime without its constant."""
    n = size["n"]
    if kind in ("dag", "cycle"):
        return n
    if kind in ("open_chain", "closed_chain"):
        return n * size["m"] ** 2
    if kind in ("weighted_open_chain", "c_closed_chain", "c_open_chain"):
        return n * size["m"] ** 3
    if kind == "partition_cycle":
        return n * (n - size["k"])
    if kind == "partition_cycle_bonus":
        return size["k"] * n * (n - size["k"])
    raise ValueError(f"unknown bound kind {kind!r}")


def step_bound(kind: str, **size: int) -> int:
    """Calibrated bound K * shape, rounded up."""
    k = constants()[kind]
    return int(-(-k * bound_shape(kind, **size) // 1))


def bound_parameters(game: Game, payload, coalitions: bool = False) -> tuple[str, dict[str, int]]:
    """Bound kind and size parameters that govern a scheduler run on ``game``."""
    if isinstance(payload, Dag):
        return "dag", {"n": game.num_nodes}
    if isinstance(payload, SimpleCycle):
        return "cycle", {"n": game.num_nodes}
    if isinstance(payload, Chain):
        size = {"n": payload.max_cycle_len(), "m": payload.m}
        if coalitions:
            return ("c_closed_chain" if payload.closed else "c_open_chain"), size
        if payload.closed:
            return "closed_chain", size
        return ("open_chain" if game.is_unweighted() else "weighted_open_chain"), size
    if isinstance(payload, PartitionCycle):
        if game.is_unweighted():
            return _pc_kind(game), {"n": game.num_nodes, "k": len(payload.top)}
        exp = split_weighted_cross_edges(game, payload)
        return _pc_kind(game), {"n": exp.game.num_nodes, "k": len(exp.partition.top)}
    raise NotGuaranteed("graph outside the supported classes", "no step bound is known")


# -- tie-broken best responses -------------------------------------------------


def _preferred(game: Game, s: Sequence[int], i: int, tie: TieBreak, ctx: TieContext | None) -> set[int] | None:
    """Colours the policy favours among equally good best responses."""
    if tie in (TieBreak.LOWEST, TieBreak.PREFER_CURRENT):
        return None
    if tie is TieBreak.PREFER_PREDECESSOR:
        if ctx is not None and ctx.predecessor is not None:
            return {s[ctx.predecessor]}
        preds = [j for j, _ in game.in_edges[i]]
        return {s[preds[0]]} if len(preds) == 1 else None
    if ctx is None or ctx.predecessor is None:
        raise TieContextError(f"tie policy {tie.value} needs partition-cycle context")
    cs = game.colour_sets[i]
    if tie is TieBreak.P2:
        score = {c: game.bonus(i, c) for c in cs}
    else:
        count = {c: 0 for c in cs}
        for j in ctx.top_preds:
            if s[j] in count:
                count[s[j]] += 1
        score = count if tie is TieBreak.P1 else {c: game.bonus(i, c) + count[c] for c in cs}
    top = max(score.values())
    return {c for c, v in score.items() if v == top}


def choose_best_response(
    game: Game, s: Sequence[int], i: int, tie: TieBreak = TieBreak.LOWEST, ctx: TieContext | None = None
) -> int:
    values = {c: colour_payoff(game, s, i, c) for c in game.colour_sets[i]}
    best = max(values.values())
    br = [c for c in game.colour_sets[i] if values[c] == best]
    if tie is TieBreak.PREFER_CURRENT and s[i] in br:
        return s[i]
    favoured = _preferred(game, s, i, tie, ctx)
    if favoured is None:
        return br[0]
    if tie is TieBreak.PREFER_PREDECESSOR:
        hit = [c for c in br if c in favoured]
        return hit[0] if hit else br[0]
    # P1/P2/P3 only constrain the case where the predecessor's colour is a best response
    pred_colour = s[ctx.predecessor]
    if pred_colour in br:
        hit = [c for c in br if c in favoured]
        if hit:
            return hit[0]
    return br[0]


def step_best_response(
    game: Game, s: Sequence[int], i: int, tie: TieBreak = TieBreak.LOWEST, ctx: TieContext | None = None
) -> tuple[Strategy, bool]:
    """Move node ``i`` to a tie-broken best response unless it already plays one."""
    check_strategy(game, s)
    if tie in (TieBreak.P1, TieBreak.P2, TieBreak.P3) and (ctx is None or ctx.predecessor is None):
        raise TieContextError(f"tie policy {tie.value} needs partition-cycle context")
    if is_best_response(game, s, i):
        return tuple(s), False
    new = list(s)
    new[i] = choose_best_response(game, s, i, tie, ctx)
    return tuple(new), True


# -- run bookkeeping -----------------------------------------------------------


class _BudgetExceeded(Exception):
    pass


class _CycleDetected(Exception):
    pass


class _Run:
    def __init__(self, game: Game, s0: Sequence[int], cap: int | None):
        check_strategy(game, s0)
        self.game = game
        self.initial = tuple(s0)
        self.s = list(s0)
        self.steps: list[Step] = []
        self.cap = cap
        self.measures: dict[str, list] = {}

    def note(self, key: str, value) -> None:
        self.measures.setdefault(key, []).append(value)

    def is_br(self, i: int) -> bool:
        return is_best_response(self.game, self.s, i)

    def move(self, moves: dict[int, int]) -> None:
        if self.cap is not None and len(self.steps) >= self.cap:
            raise _BudgetExceeded
        g, s = self.game, self.s
        before = tuple(colour_payoff(g, s, i, s[i]) for i in sorted(moves))
        for i, c in moves.items():
            s[i] = c
        after = tuple(colour_payoff(g, s, i, s[i]) for i in sorted(moves))
        self.steps.append(Step(Deviation.of(moves), before, after))

    def update(self, i: int, tie: TieBreak = TieBreak.LOWEST, ctx: TieContext | None = None) -> bool:
        if self.is_br(i):
            return False
        self.move({i: choose_best_response(self.game, self.s, i, tie, ctx)})
        return True

    def trace(self, verdict: str | None = None) -> Trace:
        if verdict is None:
            verdict = "nash" if is_nash(self.game, self.s) else "budget"
        return Trace(self.initial, list(self.steps), verdict, self.measures)


def _guarded(run: _Run, body: Callable[[], None]) -> Trace:
    try:
        body()
    except _BudgetExceeded:
        return run.trace("budget")
    except _CycleDetected:
        return run.trace("cycle-detected")
    return run.trace()


def _cap(kind: str, cap: int | None | bool, **size: int) -> int | None:
    """``cap=None`` means the default safety cap, ``False`` means none."""
    if cap is False:
        return None
    if cap is None or cap is True:
        return CAP_FACTOR * max(1, step_bound(kind, **size))
    return int(cap)


def _rounds(
    run: _Run,
    order: Sequence[int],
    start: int = 0,
    tie: TieBreak = TieBreak.LOWEST,
    ctx: Callable[[int], TieContext | None] | None = None,
    on_round: Callable[[], None] | None = None,
) -> None:
    """Cyclic best-response updates over ``order`` until a full pass changes nothing.

    Only nodes in ``order`` move, so the restriction of the state to them
    identifies the run; seeing it twice at a round start means a cycle.
    """
    size = len(order)
    seen: set[tuple[int, ...]] = set()
    idle = 0
    pos = start % size
    while idle < size:
        if pos == start % size:
            key = tuple(run.s[v] for v in order)
            if key in seen:
                raise _CycleDetected
            seen.add(key)
            if on_round is not None:
                on_round()
        v = order[pos]
        if run.update(v, tie, ctx(v) if ctx else None):
            idle = 0
        else:
            idle += 1
        pos = (pos + 1) % size


# -- DAGs ----------------------------------------------------------------------


def improve_dag(game: Game, payload: Dag, s0: Sequence[int], cap: int | None | bool = None) -> Trace:
    """One pass in topological order: each node sees its final predecessors."""
    run = _Run(game, s0, _cap("dag", cap, n=game.num_nodes))

    def body() -> None:
        for v in payload.order:
            run.update(v)

    return _guarded(run, body)


# -- simple cycles -------------------------------------------------------------


def cycle_regime(game: Game, order: Sequence[int]) -> str:
    """Which convergence argument covers this cycle game.

    ``"a"`` unweighted with any bonuses, ``"b"`` at most two bonus nodes,
    ``"c"`` at most two edges of weight other than one.
    """
    if game.is_unweighted():
        return "a"
    if len(game.bonus_nodes()) <= 2:
        return "b"
    if sum(1 for _, _, w in game.edges if w != 1) <= 2:
        return "c"
    raise NotGuaranteed(
        "simple cycle with more than two bonus nodes and more than two weighted edges",
        "fixture ex2 is such a cycle without a Nash equilibrium",
    )


def _cycle_start(game: Game, order: Sequence[int], regime: str) -> int:
    n = len(order)
    if regime == "b":
        holders = set(game.bonus_nodes())
        for p, v in enumerate(order):
            if v in holders:
                return p
        return 0
    if regime == "c":
        # start right after the first heavy edge, so its head is updated first
        for p, v in enumerate(order):
            if game.weight(order[p - 1], v) != 1:
                return p
        return 0
    return 0


def improve_simple_cycle(game: Game, payload: SimpleCycle, s0: Sequence[int], cap: int | None | bool = None) -> Trace:
    regime = cycle_regime(game, payload.order)
    start = _cycle_start(game, payload.order, regime)
    tie = TieBreak.PREFER_PREDECESSOR if regime == "a" else TieBreak.LOWEST
    run = _Run(game, s0, _cap("cycle", cap, n=game.num_nodes))
    run.measures["regime"] = [regime]
    order = payload.order

    def ctx(v: int) -> TieContext:
        p = order.index(v)
        return TieContext(order[p - 1])

    return _guarded(run, lambda: _rounds(run, order, start, tie, ctx))


# -- chains of cycles ----------------------------------------------------------


def _stabilize(run: _Run, cycle: Sequence[int], start: int = 0) -> None:
    _rounds(run, cycle, start)


def _cycle_stable(run: _Run, cycle: Sequence[int]) -> bool:
    return all(run.is_br(v) for v in cycle)


def _chain_start(chain: Chain, j: int) -> int:
    """Start position inside cycle ``j``: a node with an external in-edge."""
    if chain.closed or j < chain.m - 1:
        return 0
    prev = chain.cycles[j - 1][0]
    return chain.cycles[j].index(prev)


def guard(run: _Run, chain: Chain) -> int:
    """Largest j < m whose shared node is a break point (1-based, 0 if none)."""
    g = 0
    for j in range(chain.m - 1):
        cyc = chain.cycles[j]
        if not _cycle_stable(run, cyc):
            break
        if run.s[cyc[0]] == run.s[cyc[-1]]:
            g = j + 1
    return g


def _progress(run: _Run, chain: Chain) -> tuple[int, int]:
    return guard(run, chain), sum(_cycle_stable(run, c) for c in chain.cycles)


def _shared_weights(game: Game, chain: Chain) -> list[tuple[int, int]]:
    """(w1, w2) per shared node: its in-edge inside its own cycle and inside the next one."""
    out = []
    for j in range(chain.m - 1):
        cyc, nxt = chain.cycles[j], chain.cycles[j + 1]
        x = cyc[0]
        p = nxt.index(x)
        out.append((game.weight(cyc[-1], x), game.weight(nxt[p - 1], x)))
    return out


def _blocks(signs: Sequence[int], m: int) -> list[tuple[list[int], int]]:
    """Split cycles 0..m-1 into runs of equal shared-node sign.

    ``signs[j]`` compares the two in-weights of the node shared by cycles j
    and j+1.  A block ends at the first shared node whose sign differs from
    the block's own; the next block starts with the following cycle.
    """
    blocks = []
    j = 0
    while j < m:
        members = [j]
        sign = signs[j] if j < m - 1 else 0
        while j < m - 1 and signs[j] == sign:
            j += 1
            members.append(j)
        blocks.append((members, sign))
        j += 1
    return blocks


def _invariant_one(run: _Run, chain: Chain, j: int) -> bool:
    """s_{1^j} != s_{n^j} implies s_{n^j} is unavailable to 1^j."""
    cyc = chain.cycles[j]
    x, last = cyc[0], cyc[-1]
    return run.s[x] == run.s[last] or run.s[last] not in run.game.colour_sets[x]


def _open_chain_loop(run: _Run, chain: Chain, indices: Sequence[int], instrument: bool = True) -> None:
    """Stabilise the least unstable cycle among ``indices`` until all are stable.

    A phase ends whenever the next cycle to stabilise lies above the previous
    one (the downward propagation is over); the (guard, stable cycles) pair
    is recorded at every phase end.
    """
    last = None
    while True:
        j = next((j for j in indices if not _cycle_stable(run, chain.cycles[j])), None)
        if j is None:
            break
        if instrument and last is not None and j > last:
            run.note("progress", list(_progress(run, chain)))
        last = j
        _stabilize(run, chain.cycles[j], _chain_start(chain, j))
    if instrument:
        run.note("progress", list(_progress(run, chain)))


def _weighted_open_chain(run: _Run, chain: Chain) -> None:
    pairs = _shared_weights(run.game, chain)
    signs = [(w1 > w2) - (w1 < w2) for w1, w2 in pairs]
    blocks = _blocks(signs, chain.m)
    run.measures["blocks"] = [[list(b), s] for b, s in blocks]
    while True:
        unstable = [
            (members, sign) for members, sign in blocks
            if any(not _cycle_stable(run, chain.cycles[j]) for j in members)
        ]
        if not unstable:
            break
        members, sign = unstable[0]
        todo = [j for j in members if not _cycle_stable(run, chain.cycles[j])]
        j = todo[-1] if sign < 0 else todo[0]
        _stabilize(run, chain.cycles[j], _chain_start(chain, j))
        if sign > 0:
            # checked on the stable prefix of the block, at its increasing shared nodes
            checked = []
            for i in members:
                if not _cycle_stable(run, chain.cycles[i]):
                    break
                if i < chain.m - 1 and signs[i] > 0:
                    checked.append(_invariant_one(run, chain, i))
            run.note("invariant_one", all(checked))


def improve_open_chain(game: Game, payload: Chain, s0: Sequence[int], cap: int | None | bool = None) -> Trace:
    if payload.closed:
        raise GameError("improve_open_chain needs an open chain")
    m, n = payload.m, payload.max_cycle_len()
    if game.is_unweighted():
        run = _Run(game, s0, _cap("open_chain", cap, n=n, m=m))
        return _guarded(run, lambda: _open_chain_loop(run, payload, range(m)))
    if game.has_bonuses():
        raise NotGuaranteed(
            "weighted chain of cycles with bonuses",
            "fixture ex2 embeds into such chains, so no Nash equilibrium is promised",
        )
    run = _Run(game, s0, _cap("weighted_open_chain", cap, n=n, m=m))
    if any(w1 == w2 for w1, w2 in _shared_weights(game, payload)):
        run.measures["experimental"] = ["equal shared weights"]
        return _guarded(run, lambda: _open_chain_loop(run, payload, range(m), instrument=False))
    return _guarded(run, lambda: _weighted_open_chain(run, payload))


def _closed_chain_loop(run: _Run, chain: Chain) -> None:
    """Open-chain phase on all but the last cycle, then the last cycle, then
    a sweep back down the ring ending at the last cycle again; repeated until
    every cycle is stable."""
    m = chain.m
    last = chain.cycles[m - 1]
    sweeps = 0
    while True:
        _open_chain_loop(run, chain, range(m - 1), instrument=False)
        if all(_cycle_stable(run, c) for c in chain.cycles):
            run.note("sweeps", sweeps)
            return
        sweeps += 1
        _stabilize(run, last, 0)
        for j in [*range(m - 2, -1, -1), m - 1]:
            if not _cycle_stable(run, chain.cycles[j]):
                _stabilize(run, chain.cycles[j], 0)


def improve_closed_chain(game: Game, payload: Chain, s0: Sequence[int], cap: int | None | bool = None) -> Trace:
    if not payload.closed:
        raise GameError("improve_closed_chain needs a closed chain")
    if not game.is_unweighted():
        raise NotGuaranteed(
            "weighted closed chain of cycles",
            "fixture fig3 is a weighted closed chain without a Nash equilibrium",
        )
    if game.has_bonuses():
        raise NotGuaranteed(
            "closed chain of cycles with bonuses",
            "the closed-chain argument assumes no bonuses",
        )
    run = _Run(game, s0, _cap("closed_chain", cap, n=payload.max_cycle_len(), m=payload.m))
    return _guarded(run, lambda: _closed_chain_loop(run, payload))


# -- partition-cycles ----------------------------------------------------------


def _x_size(prev: Sequence[int], cur: Sequence[int], bottom: Sequence[int]) -> int:
    """Length of the longest suffix of V_B that changed and agrees with its last node."""
    if not bottom:
        return 0
    last = cur[bottom[-1]]
    size = 0
    for v in reversed(bottom):
        if cur[v] != prev[v] and cur[v] == last:
            size += 1
        else:
            break
    return size


def _partition_rounds(run: _Run, pc: PartitionCycle) -> None:
    game = run.game
    order = pc.order
    top = set(pc.top)
    pred = {v: order[p - 1] for p, v in enumerate(order)}
    cross_in: dict[int, list[int]] = {v: [] for v in order}
    for u, v in sorted(pc.cross_edges):
        cross_in[v].append(u)
    contexts = {v: TieContext(pred[v], tuple(cross_in[v])) for v in order}
    if game.has_bonuses():
        ties = {v: TieBreak.P2 if v in top else TieBreak.P3 for v in order}
    else:
        ties = {v: TieBreak.P1 for v in order}

    size = len(order)
    seen: set[tuple[int, ...]] = set()
    idle = 0
    pos = 0
    prev_round: tuple[int, ...] | None = None
    while idle < size:
        if pos == 0:
            key = tuple(run.s)
            if key in seen:
                raise _CycleDetected
            seen.add(key)
            # rounds that start at a Nash state only confirm it
            if prev_round is not None and not is_nash(game, key):
                run.note("x_size", _x_size(prev_round, key, pc.bottom))
            prev_round = key
        v = order[pos]
        if run.update(v, ties[v], contexts[v]):
            idle = 0
        else:
            idle += 1
        pos = (pos + 1) % size


def partition_regime(game: Game, pc: PartitionCycle) -> str:
    """``plain``, ``bonus``, ``weighted`` (E_T and cross edges) or ``weighted-bonus`` (cross edges)."""
    if game.is_unweighted():
        return "bonus" if game.has_bonuses() else "plain"
    top_edges = set(zip(pc.top, pc.top[1:]))
    heavy = {(u, v) for u, v, w in game.edges if w != 1}
    if heavy - top_edges - set(pc.cross_edges):
        raise NotGuaranteed(
            "weights on partition-cycle edges into or inside V_B",
            "fixture ex6 has no Nash equilibrium with two weighted edges between V_B nodes",
        )
    if game.has_bonuses():
        if heavy & top_edges:
            raise NotGuaranteed(
                "weights on V_T edges combined with bonuses",
                "fixture ex2 embeds into such partition-cycles",
            )
        return "weighted-bonus"
    return "weighted"


def _pc_kind(game: Game) -> str:
    return "partition_cycle_bonus" if game.has_bonuses() else "partition_cycle"


def improve_partition_cycle(
    game: Game, payload: PartitionCycle, s0: Sequence[int], cap: int | None | bool = None
) -> Trace:
    regime = partition_regime(game, payload)
    if regime in ("plain", "bonus"):
        n, k = game.num_nodes, len(payload.top)
        run = _Run(game, s0, _cap(_pc_kind(game), cap, n=n, k=k))
        run.measures["regime"] = [regime]
        return _guarded(run, lambda: _partition_rounds(run, payload))
    try:
        exp = split_weighted_cross_edges(game, payload)
    except UnsupportedWeight as err:  # pragma: no cover - partition_regime screens this
        raise NotGuaranteed(str(err), "see fixture ex6") from err
    n, k = exp.game.num_nodes, len(exp.partition.top)
    check_strategy(game, s0)
    run = _Run(exp.game, exp.embed(s0), _cap(_pc_kind(game), cap, n=n, k=k))
    inner = _guarded(run, lambda: _partition_rounds(run, exp.partition))
    trace = pull_back(game, tuple(s0), inner, exp.origin)
    trace.measures["regime"] = [regime]
    trace.measures["expanded_nodes"] = [exp.game.num_nodes]
    return trace


def pull_back(game: Game, s0: Strategy, inner: Trace, origin: Sequence[int]) -> Trace:
    """Map a trace on an expanded game back to the original nodes.

    Steps by auxiliary nodes are dropped; payoffs are recomputed on ``game``.
    """
    n = game.num_nodes
    run = _Run(game, s0, None)
    for st in inner.steps:
        moves = {i: c for i, c in st.deviation.moves if i < n and origin[i] == i}
        if moves:
            run.move(moves)
    verdict = inner.verdict
    if verdict == "nash" and not is_nash(game, run.s):
        verdict = "budget"
    out = run.trace(verdict)
    out.measures = dict(inner.measures)
    return out


# -- dispatch ------------------------------------------------------------------


def improve(game: Game, s0: Sequence[int], payload=None, cap: int | None | bool = None) -> Trace:
    """Run the scheduler matching the detected graph class."""
    payload = classify(game) if payload is None else payload
    if isinstance(payload, Dag):
        return improve_dag(game, payload, s0, cap)
    if isinstance(payload, SimpleCycle):
        return improve_simple_cycle(game, payload, s0, cap)
    if isinstance(payload, Chain):
        if payload.closed:
            return improve_closed_chain(game, payload, s0, cap)
        return improve_open_chain(game, payload, s0, cap)
    if isinstance(payload, PartitionCycle):
        return improve_partition_cycle(game, payload, s0, cap)
    raise NotGuaranteed("graph outside the supported classes", "use the oracle instead")


# -- fair random dynamics ------------------------------------------------------


def run_fair_random(game: Game, s0: Sequence[int], seed: int, step_budget: int | None = None) -> Trace:
    """Uniformly random profitable unilateral deviation at every state.

    The default budget is ten times the number of joint strategies.
    """
    budget = 10 * game.num_profiles if step_budget is None else step_budget
    rng = random.Random(seed)
    run = _Run(game, s0, None)
    while True:
        options = [(i, c) for i in range(game.num_nodes) for c in improving_colours(game, run.s, i)]
        if not options:
            return run.trace("nash")
        if len(run.steps) >= budget:
            return run.trace("budget")
        i, c = rng.choice(options)
        run.move({i: c})
