"""Concrete games from the literature and seeded random generators per graph class."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable

from .game import Game, GameError, Strategy, payoff
from .graphs import Chain, PartitionCycle, SimpleCycle


class UnknownInstance(KeyError):
    pass


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledInstance:
    game: Game
    source: str  # "example:<name>" or "generated:<regime>"
    initial: Strategy | None = None
    truth: dict[str, Any] = field(default_factory=dict, compare=False)


def _build(n, edges, sets, colours, bonuses=(), labels=None, initial=None):
    labels = labels or [str(i + 1) for i in range(n)]
    idx = {lab: i for i, lab in enumerate(labels)}
    es = [(idx[str(e[0])], idx[str(e[1])], e[2] if len(e) > 2 else 1) for e in edges]
    bs = [(idx[str(b[0])], b[1], b[2]) for b in bonuses]
    game = Game.build(n, es, sets, bs, colour_names=colours, node_labels=labels)
    init = game.strategy(initial) if initial is not None else None
    return game, init


def _fig1() -> LabeledInstance:
    sets = [
        "ab", "ac", "bc", "ab", "ac", "bc", "a", "c", "b",
    ]
    edges = [
        (1, 2), (2, 3), (3, 1), (1, 4), (4, 2), (2, 5), (5, 3), (3, 6), (6, 1),
        (7, 1), (8, 2), (9, 3),
    ]
    game, init = _build(9, edges, [list(s) for s in sets], "abc", initial="bccbccacb")
    return LabeledInstance(game, "example:fig1", init, {"nash": False, "deviator": (0, "a")})


def _fig1_plus(extra) -> Game:
    base = _fig1().game
    edges = [(u + 1, v + 1, w) for u, v, w in base.edges] + list(extra)
    game, _ = _build(9, edges, [[base.colour_names[c] for c in cs] for cs in base.colour_sets], "abc")
    return game


def _ex2() -> LabeledInstance:
    game, _ = _build(
        3,
        [(1, 2, 2), (2, 3, 2), (3, 1, 2)],
        [["a", "b"], ["a", "c"], ["b", "c"]],
        "abc",
        bonuses=[(1, "a", 1), (2, "c", 1), (3, "b", 1)],
    )
    return LabeledInstance(game, "example:ex2", None, {"nash_exists": False})


def _ex3() -> LabeledInstance:
    game = _fig1_plus([(6, 7, 1), (4, 8, 1), (5, 9, 1)])
    return LabeledInstance(game, "example:ex3", None, {"nash_exists": False})


def _fig3() -> LabeledInstance:
    return _fig3_with_weight(2, "example:fig3")


def _fig3_with_weight(w: int, source: str) -> LabeledInstance:
    game, _ = _build(
        6,
        [(1, 2, w), (2, 3, w), (3, 1, w), (4, 1), (2, 4), (5, 2), (3, 5), (6, 3), (1, 6)],
        [["a", "b"], ["a", "c"], ["b", "c"], ["a"], ["c"], ["b"]],
        "abc",
    )
    return LabeledInstance(game, source, None, {"nash_exists": w == 1})


_FIG2_SETS = [["b", "c"], ["b", "c"], ["b"], ["c"], ["a"], ["a", "b"], ["a", "c"], ["b", "c"]]
_FIG2_CROSS = [(1, 6), (2, 6), (3, 8), (4, 7)]


def _fig2_game(w67: int = 1, w78: int = 1) -> Game:
    ring = [(i, i % 8 + 1, 1) for i in range(1, 9)]
    ring[5] = (6, 7, w67)
    ring[6] = (7, 8, w78)
    game, _ = _build(8, ring + [(u, v, 1) for u, v in _FIG2_CROSS], _FIG2_SETS, "abc")
    return game


def _fig2() -> LabeledInstance:
    return LabeledInstance(
        _fig2_game(), "example:fig2", None,
        {"nash_exists": True, "top": (0, 1, 2, 3, 4), "bottom": (5, 6, 7)},
    )


def _ex6() -> LabeledInstance:
    return LabeledInstance(_fig2_game(2, 2), "example:ex6", None, {"nash_exists": False})


_FIG4_LABELS = [str(i) for i in range(1, 10)] + ["A", "B", "C"]
_FIG4_INITIAL = "aabbaaccbabc"


def _fig4_edges() -> list[tuple[str, str, int]]:
    one_way = [("1", "2", 2), ("2", "3", 2), ("3", "1", 2)]
    both_ways = [
        ("4", "1", 2), ("1", "5", 3), ("2", "6", 2), ("2", "7", 3), ("8", "3", 2), ("9", "3", 3),
        ("5", "A", 3), ("A", "6", 2), ("B", "4", 2), ("9", "B", 3), ("8", "C", 2), ("C", "7", 3),
    ]
    return one_way + [e for u, v, w in both_ways for e in ((u, v, w), (v, u, w))]


def fig4(frozen: bool = False) -> LabeledInstance:
    """Strongly connected game whose all-one-colour strong equilibria are unreachable.

    With ``frozen`` the nodes outside the central triangle keep only their
    initial colour; they never move along any path from the initial state.
    """
    if frozen:
        sets = [list("abc")] * 3 + [[c] for c in _FIG4_INITIAL[3:]]
    else:
        sets = [list("abc")] * 12
    game, init = _build(12, _fig4_edges(), sets, "abc", labels=_FIG4_LABELS, initial=_FIG4_INITIAL)
    return LabeledInstance(
        game, "example:fig4" + ("-frozen" if frozen else ""), init,
        {"strong_count": 3, "nash_reachable": False, "payoff_node2": 4},
    )


def relay_unweighted(game: Game) -> tuple[Game, tuple[int, ...]]:
    """Replace each weight-w edge u->v by w relay paths u->r->v.

    Relays copy u's colour set and carry no bonus, so a relay that best
    responds copies u and v sees exactly w matching in-edges.  Returns the
    new game and the origin of every node (relays map to their source).
    Weight-1 edges are kept as they are.
    """
    n = game.num_nodes
    origin = list(range(n))
    labels = list(game.node_labels)
    sets = list(game.colour_sets)
    edges = []
    for u, v, w in game.edges:
        if w == 1:
            edges.append((u, v, 1))
            continue
        for r in range(w):
            x = len(origin)
            origin.append(u)
            labels.append(f"{game.node_labels[u]}>{game.node_labels[v]}#{r + 1}")
            sets.append(game.colour_sets[u])
            edges += [(u, x, 1), (x, v, 1)]
    relayed = Game(len(origin), tuple(sorted(edges)), tuple(sets), game.bonuses,
                   game.colour_names, tuple(labels))
    return relayed, tuple(origin)


def fig4_unweighted() -> LabeledInstance:
    base = fig4()
    game, origin = relay_unweighted(base.game)
    init = tuple(base.initial[o] for o in origin)
    for i in range(base.game.num_nodes):
        if payoff(game, init, i) != payoff(base.game, base.initial, i):
            raise AssertionError(f"relay expansion changed the payoff of node {i}")
    return LabeledInstance(game, "example:fig4-unweighted", init, {"origin": origin})


def fig3_unweighted() -> LabeledInstance:
    return _fig3_with_weight(1, "example:fig3-unweighted")


_EXAMPLES: dict[str, Callable[[], LabeledInstance]] = {
    "fig1": _fig1,
    "ex2": _ex2,
    "ex3": _ex3,
    "fig3": _fig3,
    "fig3-unweighted": fig3_unweighted,
    "fig2": _fig2,
    "ex6": _ex6,
    "fig4": fig4,
    "fig4-frozen": lambda: fig4(frozen=True),
    "fig4-unweighted": fig4_unweighted,
}

EXAMPLE_NAMES = tuple(_EXAMPLES)


def named_example(name: str) -> LabeledInstance:
    try:
        return _EXAMPLES[name]()
    except KeyError:
        raise UnknownInstance(f"unknown example {name!r}; known: {', '.join(EXAMPLE_NAMES)}") from None


# Reduced views: free nodes only, forced nodes fixed as in the hand analysis.

EX2_UNDERLINED = [
    ("aab", 0), ("aac", 2), ("acb", 2), ("acc", 1),
    ("bab", 1), ("bac", 0), ("bcb", 2), ("bcc", 0),
]


def ex6_reduced_profiles(game: Game) -> list[tuple[str, Strategy]]:
    """All (s6, s7, s8) profiles with s3=b, s4=c, s5=a and s1=s2=s8."""
    out = []
    for s6 in "ab":
        for s7 in "ac":
            for s8 in "bc":
                full = [s8, s8, "b", "c", "a", s6, s7, s8]
                out.append((s6 + s7 + s8, game.strategy(full)))
    return out


def ex3_reduced_profiles(game: Game) -> list[tuple[str, Strategy]]:
    """(s1, s2, s3) with 4, 5, 6 copying 1, 2, 3 and 7, 8, 9 on their only colour."""
    out = []
    for s1 in "ab":
        for s2 in "ac":
            for s3 in "bc":
                full = [s1, s2, s3, s1, s2, s3, "a", "c", "b"]
                out.append((s1 + s2 + s3, game.strategy(full)))
    return out


# -- random generators ------------------------------------------------------

REGIMES = (
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
    "other",
)

REGIME_CLASS = {
    "dag": "dag",
    "cycle-two-bonus": "simple_cycle",
    "cycle-two-weight": "simple_cycle",
    "cycle-unweighted": "simple_cycle",
    "open-chain": "open_chain",
    "open-chain-weighted": "open_chain",
    "closed-chain": "closed_chain",
    "pc-plain": "partition_cycle",
    "pc-bonus": "partition_cycle",
    "pc-weighted": "partition_cycle",
    "pc-weighted-bonus": "partition_cycle",
    "other": "other",
}


@dataclass
class GenParams:
    """Knobs for :func:`generate`; ``None`` fields are drawn from the seed."""

    n: int | None = None  # node count for dag / cycle / partition-cycle
    m: int | None = None  # number of cycles in chains
    cycle_sizes: tuple[int, int] = (3, 5)
    num_colours: int = 3
    density: float = 0.6  # chance that a colour is offered to a node
    max_weight: int = 3
    max_bonus: int = 2
    bonus_rate: float = 0.6  # chance that a cycle node carries bonuses where any may
    max_profiles: int = 2**16
    max_nodes: int = 12


def _colour_sets(rng: random.Random, n: int, p: GenParams) -> list[list[int]]:
    for _ in range(200):
        sets = []
        for _ in range(n):
            cs = [c for c in range(p.num_colours) if rng.random() < p.density]
            sets.append(cs or [rng.randrange(p.num_colours)])
        size = 1
        for cs in sets:
            size *= len(cs)
        if size <= p.max_profiles:
            return sets
        p = GenParams(**{**p.__dict__, "density": p.density * 0.9})
    raise GenerationError("could not meet the profile budget")


def _relabel(rng: random.Random, n: int) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


def _finish(rng, regime, n, edges, sets, bonuses, truth, p) -> LabeledInstance:
    perm = _relabel(rng, n)
    edges = [(perm[u], perm[v], w) for u, v, w in edges]
    new_sets: list[list[int]] = [[] for _ in range(n)]
    for i, cs in enumerate(sets):
        new_sets[perm[i]] = cs
    bonuses = [(perm[i], c, b) for i, c, b in bonuses]
    names = [chr(ord("a") + c) for c in range(p.num_colours)]
    game = Game.build(n, edges, new_sets, bonuses, colour_names=names)
    init = tuple(rng.choice(cs) for cs in game.colour_sets)
    mapped = {}
    for key, val in truth.items():
        mapped[key] = val(perm) if callable(val) else val
    mapped["class"] = REGIME_CLASS[regime]
    return LabeledInstance(game, f"generated:{regime}", init, mapped)


def _bonus_for(rng, node, cs, p) -> list[tuple[int, int, int]]:
    out = []
    for c in cs:
        if rng.random() < 0.6:
            out.append((node, c, rng.randint(1, p.max_bonus)))
    if not out:
        out.append((node, rng.choice(cs), rng.randint(1, p.max_bonus)))
    return out


def generate(regime: str, seed: int, params: GenParams | None = None) -> LabeledInstance:
    """Random instance of ``regime`` (see :data:`REGIMES`), deterministic in ``seed``."""
    if regime not in REGIME_CLASS:
        raise GenerationError(f"unknown regime {regime!r}")
    p = params or GenParams()
    rng = random.Random(f"{regime}:{seed}")
    lo, hi = p.cycle_sizes
    if lo < 3 and regime != "dag":
        raise GenerationError("cycles need at least 3 nodes")

    if regime == "dag":
        n = p.n or rng.randint(2, min(10, p.max_nodes))
        edges = []
        for v in range(1, n):
            for u in rng.sample(range(v), rng.randint(0, min(v, 3))):
                edges.append((u, v, rng.randint(1, p.max_weight)))
        if not edges:
            edges.append((0, 1, 1))
        sets = _colour_sets(rng, n, p)
        bonuses = [b for i in range(n) if rng.random() < 0.3 for b in _bonus_for(rng, i, sets[i], p)]
        return _finish(rng, regime, n, edges, sets, bonuses, {}, p)

    if regime.startswith("cycle"):
        n = p.n or rng.randint(3, min(12, p.max_nodes))
        sets = _colour_sets(rng, n, p)
        ring = [(i, (i + 1) % n) for i in range(n)]
        if regime == "cycle-two-bonus":
            edges = [(u, v, rng.randint(1, p.max_weight)) for u, v in ring]
            holders = rng.sample(range(n), min(2, n))
        elif regime == "cycle-two-weight":
            heavy = set(rng.sample(range(n), min(2, n)))
            edges = [(u, v, rng.randint(2, max(2, p.max_weight)) if u in heavy else 1) for u, v in ring]
            holders = [i for i in range(n) if rng.random() < p.bonus_rate]
        else:
            edges = [(u, v, 1) for u, v in ring]
            holders = [i for i in range(n) if rng.random() < p.bonus_rate]
        bonuses = [b for i in holders for b in _bonus_for(rng, i, sets[i], p)]
        truth = {"order": lambda perm, n=n: tuple(perm[i] for i in range(n))}
        return _finish(rng, regime, n, edges, sets, bonuses, truth, p)

    if regime in ("open-chain", "open-chain-weighted", "closed-chain"):
        closed = regime == "closed-chain"
        for _ in range(100):
            m = p.m or rng.randint(2, 5)
            sizes = [rng.randint(lo, hi) for _ in range(m)]
            n = sum(sizes) - (m if closed else m - 1)
            if n > p.max_nodes and p.m is None:
                continue
            cycles = _chain_cycles(rng, sizes, closed)
            ring_edges = {(a, b) for c in cycles for a, b in zip(c, c[1:] + c[:1])}
            # two cycles of a closed 2-chain may not run over the same edge
            if len(ring_edges) == sum(sizes):
                break
        else:
            raise GenerationError("cannot fit a chain within max_nodes")
        weighted = regime == "open-chain-weighted"
        weights: dict[tuple[int, int], int] = {}
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                weights[(a, b)] = rng.randint(1, p.max_weight) if weighted else 1
        if weighted:
            _separate_shared_weights(rng, cycles, weights, p)
        edges = [(a, b, w) for (a, b), w in weights.items()]
        sets = _colour_sets(rng, n, p)
        truth = {
            "cycles": lambda perm, cs=cycles: frozenset(
                frozenset((perm[a], perm[b]) for a, b in zip(c, c[1:] + c[:1])) for c in cs
            ),
            "m": m,
        }
        return _finish(rng, regime, n, edges, sets, [], truth, p)

    if regime.startswith("pc"):
        n = p.n or rng.randint(4, min(12, p.max_nodes))
        k = rng.randint(1, n - 1)  # |V_T|
        top, bottom = list(range(k)), list(range(k, n))
        cross = set()
        for _ in range(rng.randint(1, 2 * n)):
            cross.add((rng.choice(top), rng.choice(bottom)))
        cross.discard((k - 1, k))
        if not cross:
            if k >= 2:
                cross.add((0, k))
            elif n - k >= 2:
                cross.add((0, k + 1))
            else:
                return generate(regime, seed + 10**9, params)
        ring = [(i, (i + 1) % n) for i in range(n)]
        weighted = regime in ("pc-weighted", "pc-weighted-bonus")
        ew = []
        for u, v in ring:
            on_top = u < k - 1
            w = rng.randint(1, p.max_weight) if regime == "pc-weighted" and on_top else 1
            ew.append((u, v, w))
        for u, v in sorted(cross):
            ew.append((u, v, rng.randint(1, p.max_weight) if weighted else 1))
        budget_nodes = n + sum(w - 1 for u, v, w in ew if (u, v) in cross)
        sets = _colour_sets(rng, n, p)
        bonuses = []
        if regime in ("pc-bonus", "pc-weighted-bonus"):
            holders = [i for i in range(n) if rng.random() < 0.5] or [rng.randrange(n)]
            bonuses = [b for i in holders for b in _bonus_for(rng, i, sets[i], p)]
        truth = {
            "top": lambda perm, k=k: tuple(perm[i] for i in range(k)),
            "bottom": lambda perm, k=k, n=n: tuple(perm[i] for i in range(k, n)),
            "expanded_nodes": budget_nodes,
        }
        return _finish(rng, regime, n, ew, sets, bonuses, truth, p)

    # "other": random sparse digraph, rejected if it happens to land in a named class
    from .graphs import classify

    for attempt in range(100):
        n = p.n or rng.randint(3, min(8, p.max_nodes))
        pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
        edges = [(u, v, rng.randint(1, p.max_weight)) for u, v in rng.sample(pairs, rng.randint(n, min(len(pairs), 2 * n)))]
        sets = _colour_sets(rng, n, p)
        inst = _finish(rng, regime, n, edges, sets, [], {}, p)
        if classify(inst.game).tag == "other":
            return inst
    raise GenerationError("could not draw an unclassified graph")


def _chain_cycles(rng: random.Random, sizes: list[int], closed: bool) -> list[list[int]]:
    """Cycles as node lists; cycle j starts with the node it shares with cycle j+1."""
    m = len(sizes)
    nxt = 0
    cycles: list[list[int]] = []
    first_nodes = []
    for j in range(m):
        first_nodes.append(nxt)
        nxt += 1
    for j, size in enumerate(sizes):
        cyc = [first_nodes[j]] if (j < m - 1 or closed) else []
        prev_shared = first_nodes[j - 1] if j > 0 else (first_nodes[m - 1] if closed else None)
        body = size - len(cyc) - (1 if prev_shared is not None else 0)
        fresh = list(range(nxt, nxt + body))
        nxt += body
        if prev_shared is not None:
            pos = rng.randint(0, len(fresh))
            fresh.insert(pos, prev_shared)
        cycles.append(cyc + fresh)
    used = sorted({v for c in cycles for v in c})
    remap = {v: i for i, v in enumerate(used)}
    return [[remap[v] for v in c] for c in cycles]


def _separate_shared_weights(rng, cycles, weights, p) -> None:
    """Make the two in-edges of every shared node differ in weight."""
    m = len(cycles)
    for j in range(m - 1):
        x = cycles[j][0]
        into_own = (cycles[j][-1], x)
        nxt = cycles[j + 1]
        pos = nxt.index(x)
        into_next = (nxt[pos - 1], x)
        while weights[into_own] == weights[into_next]:
            weights[into_next] = rng.randint(1, max(2, p.max_weight))


# -- bare graphs for detector scaling -----------------------------------------


def chain_digraph(num_nodes: int, seed: int, closed: bool = False, cycle_sizes=(3, 5)):
    """Random open or closed chain of cycles with roughly ``num_nodes`` nodes."""
    from .graphs import Digraph

    rng = random.Random(f"chain-digraph:{closed}:{seed}")
    lo, hi = cycle_sizes
    sizes = []
    total = 0 if closed else 1
    while total < num_nodes or len(sizes) < 2:
        sizes.append(rng.randint(lo, hi))
        total += sizes[-1] - 1
    cycles = _chain_cycles(rng, sizes, closed)
    n = 1 + max(v for c in cycles for v in c)
    edges = [(a, b) for c in cycles for a, b in zip(c, c[1:] + c[:1])]
    return Digraph.from_edges(n, edges), len(sizes)


def partition_digraph(num_nodes: int, seed: int, cross_per_node: float = 1.0):
    """Random partition-cycle on ``num_nodes`` nodes (top = first ``k`` ring nodes)."""
    from .graphs import Digraph

    rng = random.Random(f"pc-digraph:{seed}")
    n = num_nodes
    k = rng.randint(max(1, n // 4), max(1, 3 * n // 4))
    edges = {(i, (i + 1) % n) for i in range(n)}
    for _ in range(max(1, int(cross_per_node * n))):
        edges.add((rng.randrange(k), rng.randrange(k, n)))
    if not any(u < k <= v and (u, v) != (k - 1, k) for u, v in edges if v != (u + 1) % n):
        edges.add((0, n - 1) if k > 1 else (0, k + 1))
    return Digraph.from_edges(n, sorted(edges)), k


def recovers_truth(inst: LabeledInstance, payload) -> bool:
    """Does a detected payload agree with what the generator planted?

    Chains with two cycles and partition-cycles admit several valid
    decompositions, so payloads are checked for validity plus the planted
    invariants (cycle count, Hamiltonian ring) rather than literal equality.
    """
    from .graphs import verify_chain, verify_partition_cycle

    if payload.tag != inst.truth.get("class"):
        return False
    if isinstance(payload, Chain):
        return verify_chain(inst.game, payload) is None and payload.m == inst.truth["m"]
    if isinstance(payload, PartitionCycle):
        order = inst.truth["top"] + inst.truth["bottom"]
        ring = {(order[j], order[(j + 1) % len(order)]) for j in range(len(order))}
        return verify_partition_cycle(inst.game, payload) is None and set(payload.cycle_edges) == ring
    if isinstance(payload, SimpleCycle):
        order = inst.truth["order"]
        k = payload.order.index(order[0])
        return payload.order[k:] + payload.order[:k] == order
    return True
