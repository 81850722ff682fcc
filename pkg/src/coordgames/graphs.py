"""Graph-class detection and decomposition.

Detectors run in time linear in |V|+|E| and can report how much work they did
through an :class:`OpCounter`.  Each successful detection is re-checked by an
independent verifier before it is returned.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .game import Game, GameError


class DetectionFailure(Exception):
    """The graph does not belong to the requested class."""


class UnsupportedWeight(GameError):
    pass


# Detectors tick at most this many times per node plus edge.
OPS_PER_ITEM = 3


@dataclass
class OpCounter:
    ops: int = 0

    def tick(self, k: int = 1) -> None:
        self.ops += k


@dataclass(frozen=True)
class Digraph:
    """Bare adjacency lists; detectors accept this or a :class:`Game`."""

    num_nodes: int
    succ: tuple[tuple[int, ...], ...]
    pred: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Digraph":
        succ: list[list[int]] = [[] for _ in range(n)]
        pred: list[list[int]] = [[] for _ in range(n)]
        for e in edges:
            succ[e[0]].append(e[1])
            pred[e[1]].append(e[0])
        return cls(n, tuple(map(tuple, succ)), tuple(map(tuple, pred)))

    @property
    def num_edges(self) -> int:
        return sum(len(s) for s in self.succ)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(u, v) for u in range(self.num_nodes) for v in self.succ[u]}


def as_digraph(g: Game | Digraph) -> Digraph:
    if isinstance(g, Digraph):
        return g
    return Digraph.from_edges(g.num_nodes, g.edges)


# -- class payloads ---------------------------------------------------------


@dataclass(frozen=True)
class Dag:
    order: tuple[int, ...]
    tag = "dag"


@dataclass(frozen=True)
class SimpleCycle:
    order: tuple[int, ...]
    tag = "simple_cycle"


@dataclass(frozen=True)
class Chain:
    """Chain of simple cycles.

    ``cycles[j]`` lists cycle j in edge order starting at its first node, and
    that first node is shared with cycle j+1 (with cycle 0 as well for the
    last cycle of a closed chain).  ``positions[j]`` is the index of the
    shared node inside the next cycle.
    """

    closed: bool
    cycles: tuple[tuple[int, ...], ...]

    @property
    def tag(self) -> str:
        return "closed_chain" if self.closed else "open_chain"

    @property
    def m(self) -> int:
        return len(self.cycles)

    @property
    def shared(self) -> tuple[int, ...]:
        last = self.m if self.closed else self.m - 1
        return tuple(self.cycles[j][0] for j in range(last))

    @property
    def positions(self) -> tuple[int, ...]:
        out = []
        for j, x in enumerate(self.shared):
            nxt = self.cycles[(j + 1) % self.m]
            out.append(nxt.index(x))
        return tuple(out)

    def max_cycle_len(self) -> int:
        return max(len(c) for c in self.cycles)


@dataclass(frozen=True)
class PartitionCycle:
    top: tuple[int, ...]
    bottom: tuple[int, ...]
    cycle_edges: frozenset[tuple[int, int]]
    cross_edges: frozenset[tuple[int, int]]
    tag = "partition_cycle"

    @property
    def order(self) -> tuple[int, ...]:
        return self.top + self.bottom


@dataclass(frozen=True)
class Other:
    tag = "other"


GraphClass = Union[Dag, SimpleCycle, Chain, PartitionCycle, Other]

TAGS = ("dag", "simple_cycle", "open_chain", "closed_chain", "partition_cycle", "other")


# -- detectors --------------------------------------------------------------


def detect_dag(g: Game | Digraph, counter: OpCounter | None = None) -> Dag:
    d = as_digraph(g)
    counter = counter or OpCounter()
    indeg = [len(p) for p in d.pred]
    counter.tick(d.num_nodes)
    queue = deque(v for v in range(d.num_nodes) if indeg[v] == 0)
    order = []
    while queue:
        v = queue.popleft()
        order.append(v)
        counter.tick()
        for u in d.succ[v]:
            counter.tick()
            indeg[u] -= 1
            if indeg[u] == 0:
                queue.append(u)
    if len(order) != d.num_nodes:
        raise DetectionFailure("graph has a directed cycle")
    return Dag(tuple(order))


def detect_simple_cycle(g: Game | Digraph, counter: OpCounter | None = None) -> SimpleCycle:
    d = as_digraph(g)
    counter = counter or OpCounter()
    n = d.num_nodes
    if n < 2:
        raise DetectionFailure("a simple cycle needs at least two nodes")
    for v in range(n):
        counter.tick()
        if len(d.succ[v]) != 1 or len(d.pred[v]) != 1:
            raise DetectionFailure(f"node {v} does not have in- and outdegree 1")
    order = [0]
    v = d.succ[0][0]
    while v != 0:
        counter.tick()
        order.append(v)
        v = d.succ[v][0]
    if len(order) != n:
        raise DetectionFailure("graph is a union of several cycles")
    return SimpleCycle(tuple(order))


def detect_chain(g: Game | Digraph, counter: OpCounter | None = None) -> Chain:
    """Decompose an open or closed chain of cycles.

    Shared nodes are exactly the nodes of outdegree 2.  Walking every out-edge
    of a shared node until the next shared node splits the remaining nodes into
    segments; cycles are a self-loop segment (chain ends) or a pair of opposite
    segments between neighbouring shared nodes.
    """
    d = as_digraph(g)
    counter = counter or OpCounter()
    n = d.num_nodes
    for v in range(n):
        counter.tick()
        if len(d.succ[v]) not in (1, 2) or len(d.pred[v]) != len(d.succ[v]):
            raise DetectionFailure(f"node {v} has degrees outside the chain pattern")
    shared = [v for v in range(n) if len(d.succ[v]) == 2]
    counter.tick(n)
    if not shared:
        raise DetectionFailure("no node of outdegree 2; a chain needs at least two cycles")
    is_shared = [False] * n
    for v in shared:
        is_shared[v] = True

    # segments: (start, interior, end)
    segments: list[tuple[int, tuple[int, ...], int]] = []
    covered = [False] * n
    out_segs: dict[int, list[int]] = {a: [] for a in shared}
    for a in shared:
        for b in d.succ[a]:
            interior = []
            v = b
            while not is_shared[v]:
                counter.tick()
                if covered[v]:
                    raise DetectionFailure(f"node {v} is reached twice")
                covered[v] = True
                interior.append(v)
                v = d.succ[v][0]
            counter.tick()
            out_segs[a].append(len(segments))
            segments.append((a, tuple(interior), v))
    if sum(covered) + len(shared) != n:
        raise DetectionFailure("graph is not connected through its shared nodes")

    loops = [i for i, (a, _, b) in enumerate(segments) if a == b]
    counter.tick(len(segments))

    def join(first: int, back: int) -> tuple[int, ...]:
        a, inner, b = segments[first]
        _, inner2, _ = segments[back]
        return (a,) + inner + (b,) + inner2

    def key(seg_ids: Iterable[int]) -> int:
        return min(min(segments[i][1], default=n) for i in seg_ids)

    if len(loops) == 2:
        ends = [segments[i][0] for i in loops]
        if len(shared) == 1:
            x = shared[0]
            la, lb = sorted(loops, key=lambda i: key([i]))
            cycles = [(x,) + segments[la][1], segments[lb][1] + (x,)]
            return _verified(d, Chain(False, tuple(cycles)))
        if ends[0] == ends[1]:
            raise DetectionFailure("both end cycles hang off the same shared node")
        # orient so that the end cycle holding the smaller node id comes first
        start_loop = min(loops, key=lambda i: min((segments[i][0],) + segments[i][1]))
        x = segments[start_loop][0]
        order = [x]
        prev = None
        between: list[tuple[int, int]] = []  # (segment x_j -> x_{j-1}, segment x_{j-1} -> x_j)
        while True:
            counter.tick()
            nxt = [i for i in out_segs[x] if segments[i][2] != x and segments[i][2] != prev]
            if not nxt:
                break
            if len(nxt) != 1:
                raise DetectionFailure(f"shared node {x} has no unique continuation")
            fwd = nxt[0]
            y = segments[fwd][2]
            back = [i for i in out_segs[y] if segments[i][2] == x]
            if len(back) != 1:
                raise DetectionFailure(f"shared nodes {x} and {y} are not joined by one cycle")
            between.append((back[0], fwd))
            prev, x = x, y
            order.append(x)
            if len(order) > len(shared):
                raise DetectionFailure("shared nodes do not form a path")
        if len(order) != len(shared):
            raise DetectionFailure("shared nodes do not form a single path")
        last_loop = [i for i in loops if i != start_loop][0]
        if segments[last_loop][0] != order[-1]:
            raise DetectionFailure("end cycles are not at the ends of the chain")
        cycles = [(order[0],) + segments[start_loop][1]]
        for back, fwd in between:
            cycles.append(join(back, fwd))
        cycles.append(segments[last_loop][1] + (order[-1],))
        return _verified(d, Chain(False, tuple(cycles)))

    if loops:
        raise DetectionFailure(f"{len(loops)} end cycles; chains have 0 (closed) or 2 (open)")

    if len(shared) == 2:
        x1, x2 = shared
        f = sorted(out_segs[x1], key=lambda i: key([i]))
        b = sorted(out_segs[x2], key=lambda i: key([i]))
        if any(segments[i][2] != x2 for i in f) or any(segments[i][2] != x1 for i in b):
            raise DetectionFailure("two shared nodes must be joined by four segments")
        # either pairing of forward and backward segments is a decomposition;
        # take the first whose cycles both have at least 3 nodes
        for bf, bs in ((b[0], b[1]), (b[1], b[0])):
            cycles = [join(f[0], bf), join(bs, f[1])]
            if min(len(c) for c in cycles) >= 3:
                return _verified(d, Chain(True, tuple(cycles)))
        raise DetectionFailure("two shared nodes cannot form two cycles of 3+ nodes")

    # ring of shared nodes; neighbour pairs are joined by one segment each way
    nbrs: dict[int, list[int]] = {}
    seg_between: dict[tuple[int, int], int] = {}
    for a in shared:
        ends = [segments[i][2] for i in out_segs[a]]
        counter.tick(2)
        if ends[0] == ends[1]:
            raise DetectionFailure(f"shared node {a} has both segments ending at {ends[0]}")
        nbrs[a] = ends
        for i in out_segs[a]:
            seg_between[(a, segments[i][2])] = i
    for a in shared:
        for b in nbrs[a]:
            if (b, a) not in seg_between:
                raise DetectionFailure(f"no segment back from {b} to {a}")
    pairs = {tuple(sorted((a, b))) for a in shared for b in nbrs[a]}
    first = min(
        pairs,
        key=lambda p: sorted(set(join(seg_between[p], seg_between[p[::-1]]))),
    )
    x_last, x1 = first[1], first[0]
    ring = [x1]
    prev = x_last
    x = x1
    while True:
        counter.tick()
        y = [b for b in nbrs[x] if b != prev][0]
        if y == x1:
            break
        if len(ring) >= len(shared):
            raise DetectionFailure("shared nodes do not form a single ring")
        ring.append(y)
        prev, x = x, y
    if len(ring) != len(shared) or ring[-1] != x_last:
        raise DetectionFailure("shared nodes do not form a single ring")
    m = len(ring)
    cycles = []
    for j in range(m):
        cur, before = ring[j], ring[j - 1]
        cycles.append(join(seg_between[(cur, before)], seg_between[(before, cur)]))
    return _verified(d, Chain(True, tuple(cycles)))


def _verified(d: Digraph, chain: Chain) -> Chain:
    problem = verify_chain(d, chain)
    if problem:
        raise DetectionFailure(problem)
    return chain


def verify_chain(g: Game | Digraph, chain: Chain) -> str | None:
    """Independent check of a chain payload; returns the violated condition."""
    d = as_digraph(g)
    m = chain.m
    if m < 2:
        return "a chain needs at least two cycles"
    edges = set()
    member: dict[int, list[int]] = {}
    for j, cyc in enumerate(chain.cycles):
        if len(cyc) < 3:
            return f"cycle {j} has fewer than 3 nodes"
        if len(set(cyc)) != len(cyc):
            return f"cycle {j} repeats a node"
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if (a, b) in edges:
                return f"edge {a}->{b} used by two cycles"
            edges.add((a, b))
        for v in cyc:
            member.setdefault(v, []).append(j)
    if edges != d.edge_set():
        return "cycle edges do not match the graph's edges"
    if set(member) != set(range(d.num_nodes)):
        return "cycles do not cover every node"
    shared = chain.shared
    if len(set(shared)) != len(shared):
        return "two neighbouring pairs of cycles share the same node"
    expect = {x: sorted({j, (j + 1) % m}) for j, x in enumerate(shared)}
    for v, js in member.items():
        if v in expect:
            if js != expect[v]:
                return f"shared node {v} lies on cycles {js} instead of {expect[v]}"
        elif len(js) > 1:
            return f"cycles {js[0]} and {js[1]} share node {v} but are not joined there"
    last = m if chain.closed else m - 1
    for j in range(last):
        nxt = chain.cycles[(j + 1) % m]
        if nxt.index(chain.cycles[j][0]) == 0:
            return f"shared node of cycles {j} and {j + 1} starts both cycles"
    return None


def detect_partition_cycle(g: Game | Digraph, counter: OpCounter | None = None) -> PartitionCycle:
    """Recover the Hamiltonian cycle, V_T and V_B of a partition-cycle.

    Top nodes have indegree 1 and bottom nodes outdegree 1, so an edge whose
    source has outdegree 1 or whose target has indegree 1 must be a cycle edge.
    Those edges leave at most the single top-to-bottom cycle edge undecided.
    The bottom part is the shortest arc covering every cross-edge target.
    """
    d = as_digraph(g)
    counter = counter or OpCounter()
    n = d.num_nodes
    outdeg = [len(s) for s in d.succ]
    indeg = [len(p) for p in d.pred]
    counter.tick(n)
    if n < 2 or min(outdeg) < 1 or min(indeg) < 1:
        raise DetectionFailure("every node needs in- and outdegree at least 1")
    nxt = [-1] * n
    prv = [-1] * n
    ambiguous = []
    for u in range(n):
        for v in d.succ[u]:
            counter.tick()
            if outdeg[u] == 1 or indeg[v] == 1:
                if nxt[u] != -1 or prv[v] != -1:
                    raise DetectionFailure(f"edge {u}->{v} conflicts with another forced cycle edge")
                nxt[u], prv[v] = v, u
            else:
                ambiguous.append((u, v))
    forced = sum(1 for u in range(n) if nxt[u] != -1)
    if forced == n - 1:
        heads = [v for v in range(n) if prv[v] == -1]
        tails = [u for u in range(n) if nxt[u] == -1]
        if len(heads) != 1 or len(tails) != 1 or (tails[0], heads[0]) not in set(ambiguous):
            raise DetectionFailure("forced cycle edges cannot be closed into one cycle")
        nxt[tails[0]], prv[heads[0]] = heads[0], tails[0]
    elif forced != n:
        raise DetectionFailure("too few forced cycle edges for a Hamiltonian cycle")
    order = [0]
    v = nxt[0]
    while v != 0:
        counter.tick()
        order.append(v)
        if len(order) > n:
            break
        v = nxt[v]
    if len(order) != n:
        raise DetectionFailure("cycle edges split into several cycles")
    cross = [(u, v) for u in range(n) for v in d.succ[u] if nxt[u] != v]
    counter.tick(n + len(cross))
    if not cross:
        raise DetectionFailure("no cross-edges; this is a simple cycle")
    role = [0] * n  # 1 = cross source (top), 2 = cross target (bottom)
    for u, v in cross:
        counter.tick()
        if role[u] == 2 or role[v] == 1:
            raise DetectionFailure(f"node {u if role[u] == 2 else v} is both a cross source and target")
        role[u], role[v] = 1, 2
    labelled = [(i, role[v]) for i, v in enumerate(order) if role[v]]
    changes = [
        k for k in range(len(labelled)) if labelled[k][1] != labelled[k - 1][1]
    ]
    counter.tick(len(labelled))
    if len(changes) != 2:
        raise DetectionFailure("cross-edge sources and targets interleave around the cycle")
    # first target after the run of sources starts V_B; last target before the next source ends it
    start = next(k for k in changes if labelled[k][1] == 2)
    stop = next(k for k in changes if labelled[k][1] == 1)
    first_b = labelled[start][0]
    last_b = labelled[stop - 1][0]
    rotated = order[first_b:] + order[:first_b]
    size_b = (last_b - first_b) % n + 1
    bottom = tuple(rotated[:size_b])
    top = tuple(rotated[size_b:])
    pc = PartitionCycle(
        top=top,
        bottom=bottom,
        cycle_edges=frozenset((u, nxt[u]) for u in range(n)),
        cross_edges=frozenset(cross),
    )
    problem = verify_partition_cycle(d, pc)
    if problem:
        raise DetectionFailure(problem)
    return pc


def verify_partition_cycle(g: Game | Digraph, pc: PartitionCycle) -> str | None:
    d = as_digraph(g)
    order = pc.order
    if not pc.top or not pc.bottom:
        return "V_T and V_B must both be non-empty"
    if sorted(order) != list(range(d.num_nodes)):
        return "V_T and V_B do not partition the nodes"
    ring = {(a, b) for a, b in zip(order, order[1:] + order[:1])}
    if ring != set(pc.cycle_edges):
        return "cycle edges do not follow V_T then V_B"
    edges = d.edge_set()
    if not ring <= edges:
        return "a cycle edge is missing from the graph"
    if edges - ring != set(pc.cross_edges):
        return "cross-edges do not match the non-cycle edges"
    top, bottom = set(pc.top), set(pc.bottom)
    for u, v in pc.cross_edges:
        if u not in top or v not in bottom:
            return f"cross-edge {u}->{v} does not go from V_T to V_B"
    return None


def classify(g: Game | Digraph) -> GraphClass:
    d = as_digraph(g)
    for detect in (detect_dag, detect_simple_cycle, detect_chain, detect_partition_cycle):
        try:
            return detect(d)
        except DetectionFailure:
            continue
    return Other()


# -- weighted cross-edge splitting ------------------------------------------


@dataclass(frozen=True)
class Expansion:
    game: Game
    partition: PartitionCycle
    origin: tuple[int, ...]  # expanded node -> original node

    def embed(self, s: Sequence[int]) -> tuple[int, ...]:
        """Original strategy with every clone copying its source node."""
        return tuple(s[o] for o in self.origin)

    def restrict(self, s: Sequence[int]) -> tuple[int, ...]:
        n = len(set(self.origin))
        return tuple(s[:n])


def split_weighted_cross_edges(game: Game, pc: PartitionCycle) -> Expansion:
    """Replace every cross-edge of weight w > 1 by w unit cross-edges.

    The source node u gets w-1 clones placed right after it on the cycle;
    each clone has u's colour set, no bonus and one unit edge to the target.
    """
    top_edges = {(a, b) for a, b in zip(pc.top, pc.top[1:])}
    cross = set(pc.cross_edges)
    weights = {(u, v): w for u, v, w in game.edges}
    for (u, v), w in weights.items():
        if w != 1 and (u, v) not in cross and (u, v) not in top_edges:
            raise UnsupportedWeight(f"edge {u}->{v} has weight {w} outside E_T and E_p")

    n = game.num_nodes
    origin = list(range(n))
    labels = list(game.node_labels)
    colour_sets = list(game.colour_sets)
    chains: dict[int, list[int]] = {u: [u] for u in range(n)}
    new_edges: list[tuple[int, int, int]] = []
    new_cross: set[tuple[int, int]] = set()
    for u, v in sorted(cross):
        w = weights[(u, v)]
        if w == 0:
            continue
        new_edges.append((u, v, 1))
        new_cross.add((u, v))
        for r in range(w - 1):
            c = len(origin)
            origin.append(u)
            labels.append(f"{game.node_labels[u]}'{len(chains[u])}")
            colour_sets.append(game.colour_sets[u])
            chains[u].append(c)
            new_edges.append((c, v, 1))
            new_cross.add((c, v))
    order = pc.order
    cyc_order: list[int] = []
    for u in order:
        cyc_order.extend(chains[u])
    ring = []
    for a, b in zip(cyc_order, cyc_order[1:] + cyc_order[:1]):
        # links inside a clone chain are unit; the chain's last node carries u's cycle edge
        w = 1 if origin[a] == origin[b] else weights[(origin[a], origin[b])]
        new_edges.append((a, b, w))
        ring.append((a, b))
    top = tuple(x for u in pc.top for x in chains[u])
    bottom = tuple(pc.bottom)
    expanded = Game(
        num_nodes=len(origin),
        edges=tuple(sorted(new_edges)),
        colour_sets=tuple(colour_sets),
        bonuses=game.bonuses,
        colour_names=game.colour_names,
        node_labels=tuple(labels),
    )
    part = PartitionCycle(top, bottom, frozenset(ring), frozenset(new_cross))
    return Expansion(expanded, part, tuple(origin))


# -- DOT export -------------------------------------------------------------

_PALETTE = ("lightblue", "lightpink", "palegreen", "khaki", "plum", "lightsalmon", "lightcyan")


def to_dot(game: Game, cls: GraphClass | None = None, strategy: Sequence[int] | None = None) -> str:
    cls = classify(game) if cls is None else cls
    fill: dict[int, str] = {}
    if isinstance(cls, Chain):
        for j, cyc in enumerate(cls.cycles):
            for v in cyc:
                fill.setdefault(v, _PALETTE[j % len(_PALETTE)])
        for v in cls.shared:
            fill[v] = "gray"
    elif isinstance(cls, PartitionCycle):
        for v in cls.top:
            fill[v] = "lightblue"
        for v in cls.bottom:
            fill[v] = "lightpink"
    lines = [f"digraph G {{", f'  label="{cls.tag}";']
    for i in range(game.num_nodes):
        cols = ",".join(game.colour_names[c] for c in game.colour_sets[i])
        chosen = f" [{game.colour_names[strategy[i]]}]" if strategy is not None else ""
        style = f', style=filled, fillcolor="{fill[i]}"' if i in fill else ""
        lines.append(f'  n{i} [label="{game.node_labels[i]} {{{cols}}}{chosen}"{style}];')
    for u, v, w in game.edges:
        lab = f' [label="{w}"]' if w != 1 else ""
        lines.append(f"  n{u} -> n{v}{lab};")
    lines.append("}")
    return "\n".join(lines) + "\n"
