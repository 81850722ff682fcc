"""Coalition deviations from Nash states and c-improvement paths.

From a Nash state every profitable coalition deviation contains a directed
cycle whose members all move to one colour, so candidate deviations are
indexed by (cycle, colour) pairs.  For a given colour the largest profitable
all-``c`` coalition is a fixpoint (see :func:`coordgames.game.unicolour_fixpoint`);
a candidate cycle is realisable exactly when that fixpoint contains it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .dynamics import (
    NotGuaranteed,
    Trace,
    _closed_chain_loop,
    _guarded,
    _Run,
    _cap,
    improve_simple_cycle,
    step_bound,
)
from .game import (
    Deviation,
    Game,
    GameError,
    _supported_candidates,
    colour_payoff,
    exhaustive_coalition_search,
    is_nash,
    pruned_coalition_search,
    unicolour_fixpoint,
)
from .graphs import Chain, GraphClass, SimpleCycle, as_digraph


class PreconditionError(GameError):
    pass


class EmbeddingError(GameError):
    pass


@dataclass(frozen=True)
class CoalitionCandidate:
    cycle_nodes: tuple[int, ...]
    target_colour: int

    def check(self, game: Game) -> None:
        nodes = self.cycle_nodes
        if len(set(nodes)) != len(nodes) or len(nodes) < 2:
            raise GameError("candidate cycle must list at least two distinct nodes")
        edges = as_digraph(game).edge_set()
        for a, b in zip(nodes, nodes[1:] + nodes[:1]):
            if (a, b) not in edges:
                raise GameError(f"candidate cycle misses edge {a}->{b}")
        for v in nodes:
            if self.target_colour not in game.colour_sets[v]:
                raise GameError(f"colour {self.target_colour} is not available to node {v}")


def chain_cycles(chain: Chain) -> list[tuple[int, ...]]:
    """Constituent cycles, followed for a closed chain by the two ring cycles."""
    out = [tuple(c) for c in chain.cycles]
    if not chain.closed:
        return out
    m = chain.m
    # entry[j]: where the node shared with the previous cycle sits in cycle j
    entry = [chain.positions[(j - 1) % m] for j in range(m)]
    forward = tuple(v for j in range(m) for v in chain.cycles[j][entry[j]:])
    backward = tuple(v for j in range(m - 1, -1, -1) for v in chain.cycles[j][: entry[j]])
    out.extend([forward, backward])
    return out


def candidate_deviation(game: Game, s: Sequence[int], cand: CoalitionCandidate) -> Deviation | None:
    """Largest profitable all-colour coalition containing the candidate cycle."""
    c = cand.target_colour
    if any(c not in game.colour_sets[v] or s[v] == c for v in cand.cycle_nodes):
        return None
    members = unicolour_fixpoint(game, s, c, _supported_candidates(game, s, c))
    if not set(cand.cycle_nodes) <= set(members):
        return None
    return Deviation.of((i, c) for i in members)


def _chain_deviation(game: Game, s: Sequence[int], chain: Chain) -> tuple[Deviation, CoalitionCandidate] | None:
    for cyc in chain_cycles(chain):
        for c in range(game.num_colours):
            cand = CoalitionCandidate(cyc, c)
            d = candidate_deviation(game, s, cand)
            if d is not None:
                return d, cand
    return None


def find_profitable_coalition_from_nash(
    game: Game, s: Sequence[int], cls: GraphClass, require_nash: bool = True
) -> Deviation | None:
    """A profitable coalition deviation from the Nash state ``s``, or ``None``.

    With ``require_nash=False`` a non-Nash state is allowed and answered by
    the smallest deviation of an exhaustive (budgeted) search.
    """
    if not is_nash(game, s):
        if require_nash:
            raise PreconditionError("coalition search expects a Nash equilibrium")
        return exhaustive_coalition_search(game, s)
    if isinstance(cls, SimpleCycle):
        for c in range(game.num_colours):
            d = candidate_deviation(game, s, CoalitionCandidate(tuple(cls.order), c))
            if d is not None:
                return d
        return None
    if isinstance(cls, Chain):
        hit = _chain_deviation(game, s, cls)
        return None if hit is None else hit[0]
    return pruned_coalition_search(game, s)


def has_unicolour_cycle(game: Game, d: Deviation) -> bool:
    """Some directed cycle inside the coalition whose members share a new colour."""
    colours = d.new_colours
    for c in set(colours.values()):
        group = {i for i, x in colours.items() if x == c}
        # peel off members without a predecessor in the group; a cycle survives
        alive = set(group)
        changed = True
        while changed:
            changed = False
            for i in list(alive):
                if not any(j in alive for j, _ in game.in_edges[i]):
                    alive.discard(i)
                    changed = True
        if alive:
            return True
    return False


# -- simple cycles -------------------------------------------------------------


def _all_same(game: Game, nodes: Sequence[int], t: Sequence[int], c: int) -> tuple[int, ...] | None:
    """All-``c`` recolouring of ``t`` if every node that moves strictly gains."""
    if any(c not in game.colour_sets[i] for i in nodes):
        return None
    u = list(t)
    for i in nodes:
        u[i] = c
    moved = [i for i in nodes if t[i] != c]
    if not moved:
        return None
    if all(colour_payoff(game, u, i, c) > colour_payoff(game, t, i, t[i]) for i in moved):
        return tuple(u)
    return None


def c_improve_simple_cycle(game: Game, payload: SimpleCycle, s0: Sequence[int], cap=None) -> Trace:
    """Improvement path to a Nash state, then one jump to the end of the unicolour chain."""
    trace = improve_simple_cycle(game, payload, s0, cap)
    if trace.verdict != "nash":
        return trace
    s = trace.final
    nodes = payload.order
    t = s
    while True:
        nxt = next(
            (u for c in range(game.num_colours) if (u := _all_same(game, nodes, t, c)) is not None),
            None,
        )
        if nxt is None:
            break
        t = nxt
    run = _Run(game, s0, None)
    run.steps = list(trace.steps)
    run.s = list(s)
    run.measures = dict(trace.measures)
    if t != s:
        run.move({i: t[i] for i in nodes if t[i] != s[i]})
    return run.trace("strong")


# -- chains --------------------------------------------------------------------


def _c_closed_loop(run: _Run, chain: Chain) -> None:
    shared = set(chain.shared)
    while True:
        _closed_chain_loop(run, chain)
        hit = _chain_deviation(run.game, run.s, chain)
        if hit is None:
            return
        d, cand = hit
        run.move(d.new_colours)
        run.note("frozen", [len(run.steps) - 1, list(cand.cycle_nodes)])
        if set(cand.cycle_nodes) <= shared:
            run.note("ring_of_shared_nodes", len(run.steps) - 1)


def c_improve_closed_chain(game: Game, payload: Chain, s0: Sequence[int], cap=None) -> Trace:
    if not payload.closed:
        raise GameError("c_improve_closed_chain needs a closed chain")
    if not game.is_unweighted():
        raise NotGuaranteed(
            "weighted closed chain of cycles",
            "fixture fig3 is a weighted closed chain without a Nash equilibrium",
        )
    if game.has_bonuses():
        raise NotGuaranteed("closed chain of cycles with bonuses", "the closed-chain argument assumes no bonuses")
    run = _Run(game, s0, _cap("c_closed_chain", cap, n=payload.max_cycle_len(), m=payload.m))
    trace = _guarded(run, lambda: _c_closed_loop(run, payload))
    if trace.verdict == "nash":
        trace.verdict = "strong"
    return trace


@dataclass(frozen=True)
class Embedding:
    game: Game
    chain: Chain
    bridge: tuple[int, int, int, int]  # u, e1, v, e2


def close_open_chain(game: Game, chain: Chain) -> Embedding:
    """Close an open chain with a four-node cycle through two fresh single-colour nodes.

    The fresh nodes only offer a new colour nobody else has, so their edges
    never pay and every original payoff is unchanged.
    """
    if chain.closed:
        raise EmbeddingError("chain is already closed")
    first, last = chain.cycles[0], chain.cycles[-1]
    x0 = first[0]
    avoid_first = {x0, first[-1]}
    xm = chain.cycles[-2][0]
    p = last.index(xm)
    avoid_last = {xm, last[p - 1]}
    u = next((v for v in first if v not in avoid_first), None)
    v = next((w for w in last if w not in avoid_last), None)
    if u is None or v is None:
        raise EmbeddingError("end cycles need a node besides the shared node and its predecessor")
    n = game.num_nodes
    e1, e2 = n, n + 1
    star = game.num_colours
    name = "*"
    while name in game.colour_names:
        name += "*"
    edges = list(game.edges) + [(u, e1, 1), (e1, v, 1), (v, e2, 1), (e2, u, 1)]
    ext = Game(
        num_nodes=n + 2,
        edges=tuple(sorted(edges)),
        colour_sets=game.colour_sets + ((star,), (star,)),
        bonuses=game.bonuses,
        colour_names=game.colour_names + (name,),
        node_labels=game.node_labels + ("bridge1", "bridge2"),
    )
    q = last.index(v)
    rotated = last[q:] + last[:q]
    cycles = tuple(chain.cycles[:-1]) + (rotated, (u, e1, v, e2))
    return Embedding(ext, Chain(True, cycles), (u, e1, v, e2))


def c_improve_open_chain(game: Game, payload: Chain, s0: Sequence[int], cap=None) -> Trace:
    if payload.closed:
        raise GameError("c_improve_open_chain needs an open chain")
    if not game.is_unweighted():
        raise NotGuaranteed(
            "weighted open chain of cycles",
            "c-improvement paths for weighted open chains are an open problem",
        )
    if is_nash(game, s0) and pruned_coalition_search(game, s0) is None:
        return Trace(tuple(s0), [], "strong", {})
    emb = close_open_chain(game, payload)
    star = emb.game.num_colours - 1
    ext_s0 = tuple(s0) + (star, star)
    if cap is None:
        cap = 10 * max(1, step_bound("c_open_chain", n=payload.max_cycle_len(), m=payload.m))
    inner = c_improve_closed_chain(emb.game, emb.chain, ext_s0, cap)
    run = _Run(game, s0, None)
    n = game.num_nodes
    for st in inner.steps:
        moves = {i: c for i, c in st.deviation.moves if i < n}
        if moves:
            run.move(moves)
    out = run.trace(inner.verdict)
    out.measures = dict(inner.measures)
    out.measures["bridge"] = [list(emb.bridge)]
    return out


def c_improve(game: Game, s0: Sequence[int], payload=None, cap=None) -> Trace:
    from .graphs import classify

    payload = classify(game) if payload is None else payload
    if isinstance(payload, SimpleCycle):
        return c_improve_simple_cycle(game, payload, s0, cap)
    if isinstance(payload, Chain):
        if payload.closed:
            return c_improve_closed_chain(game, payload, s0, cap)
        return c_improve_open_chain(game, payload, s0, cap)
    raise NotGuaranteed(
        f"no c-improvement construction for class {payload.tag}",
        "left open for weighted open chains and partition-cycles",
    )
