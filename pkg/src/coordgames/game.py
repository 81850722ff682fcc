"""Coordination games on weighted directed graphs with bonuses.

A node's payoff is the total weight of incoming edges from neighbours that
picked the same colour, plus a fixed bonus for the colour itself.  Everything
is integer arithmetic; no predicate here takes a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import prod
from typing import Iterable, Iterator, Mapping, Sequence

Strategy = tuple[int, ...]

DEFAULT_SIZE_BUDGET = 2**20


class GameError(ValueError):
    """Structurally invalid game, strategy or node reference."""


class MalformedDeviation(GameError):
    pass


class SizeLimitError(RuntimeError):
    """An exhaustive search would exceed its configured budget."""


@dataclass(frozen=True)
class Game:
    """Immutable problem instance.

    ``edges`` holds ``(src, dst, weight)`` triples, ``colour_sets`` one sorted
    tuple of colour ids per node and ``bonuses`` sorted ``(node, colour, value)``
    triples with non-zero value.  Use :meth:`build` to construct from names.
    """

    num_nodes: int
    edges: tuple[tuple[int, int, int], ...]
    colour_sets: tuple[tuple[int, ...], ...]
    bonuses: tuple[tuple[int, int, int], ...] = ()
    colour_names: tuple[str, ...] = ()
    node_labels: tuple[str, ...] = ()

    in_edges: tuple[tuple[tuple[int, int], ...], ...] = field(
        init=False, repr=False, compare=False
    )
    out_neighbours: tuple[tuple[int, ...], ...] = field(
        init=False, repr=False, compare=False
    )
    _bonus: tuple[dict[int, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = self.num_nodes
        if not isinstance(n, int) or n < 1:
            raise GameError("num_nodes must be a positive integer")
        if not self.colour_names:
            top = max((c for cs in self.colour_sets for c in cs), default=-1)
            object.__setattr__(self, "colour_names", tuple(str(c) for c in range(top + 1)))
        if not self.node_labels:
            object.__setattr__(self, "node_labels", tuple(str(i) for i in range(n)))
        if len(self.node_labels) != n:
            raise GameError("node_labels must have one entry per node")
        k = len(self.colour_names)
        if len(self.colour_sets) != n:
            raise GameError(f"expected {n} colour sets, got {len(self.colour_sets)}")
        for i, cs in enumerate(self.colour_sets):
            if not cs:
                raise GameError(f"node {i} has an empty colour set")
            if tuple(sorted(set(cs))) != tuple(cs):
                raise GameError(f"colour set of node {i} must be sorted and duplicate-free")
            if cs[0] < 0 or cs[-1] >= k:
                raise GameError(f"colour set of node {i} references an unknown colour")

        ins: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        outs: list[list[int]] = [[] for _ in range(n)]
        seen = set()
        for src, dst, w in self.edges:
            if not (0 <= src < n and 0 <= dst < n):
                raise GameError(f"edge {src}->{dst} references a node outside 0..{n - 1}")
            if src == dst:
                raise GameError(f"self loop at node {src}")
            if (src, dst) in seen:
                raise GameError(f"parallel edge {src}->{dst}")
            if not isinstance(w, int) or w < 0:
                raise GameError(f"edge {src}->{dst} has a weight that is not a non-negative integer")
            seen.add((src, dst))
            ins[dst].append((src, w))
            outs[src].append(dst)

        bonus: list[dict[int, int]] = [{} for _ in range(n)]
        for i, c, v in self.bonuses:
            if not 0 <= i < n:
                raise GameError(f"bonus for unknown node {i}")
            if c not in self.colour_sets[i]:
                raise GameError(f"bonus colour {c} is not available to node {i}")
            if not isinstance(v, int) or v < 0:
                raise GameError(f"bonus of node {i} must be a non-negative integer")
            if c in bonus[i]:
                raise GameError(f"duplicate bonus entry for node {i}")
            if v:
                bonus[i][c] = v
        object.__setattr__(self, "in_edges", tuple(tuple(e) for e in ins))
        object.__setattr__(self, "out_neighbours", tuple(tuple(o) for o in outs))
        object.__setattr__(self, "_bonus", tuple(bonus))

    @classmethod
    def build(
        cls,
        num_nodes: int,
        edges: Iterable[Sequence[int]],
        colour_sets: Sequence[Iterable],
        bonuses: Mapping | Iterable = (),
        colour_names: Sequence[str] | None = None,
        node_labels: Sequence[str] | None = None,
    ) -> "Game":
        """Construct a game; colours may be given as names or ids.

        Edges without a weight get weight 1.  ``bonuses`` is either a mapping
        ``(node, colour) -> value`` or an iterable of ``(node, colour, value)``.
        """
        names = list(colour_names) if colour_names is not None else None
        if names is None:
            found = []
            for cs in colour_sets:
                for c in cs:
                    if c not in found:
                        found.append(c)
            if all(isinstance(c, int) for c in found):
                names = [str(c) for c in range(max(found) + 1)] if found else []
            else:
                names = sorted(str(c) for c in found)
        index = {name: i for i, name in enumerate(names)}

        def cid(c) -> int:
            if isinstance(c, int):
                return c
            if c not in index:
                raise GameError(f"unknown colour {c!r}")
            return index[c]

        norm_edges = []
        for e in edges:
            src, dst = e[0], e[1]
            w = e[2] if len(e) > 2 else 1
            norm_edges.append((src, dst, w))
        sets = tuple(tuple(sorted({cid(c) for c in cs})) for cs in colour_sets)
        items = bonuses.items() if isinstance(bonuses, Mapping) else (((b[0], b[1]), b[2]) for b in bonuses)
        norm_bonus = sorted((i, cid(c), v) for (i, c), v in items if v)
        return cls(
            num_nodes=num_nodes,
            edges=tuple(sorted(norm_edges)),
            colour_sets=sets,
            bonuses=tuple(norm_bonus),
            colour_names=tuple(names),
            node_labels=tuple(node_labels) if node_labels is not None else (),
        )

    # -- small conveniences -------------------------------------------------

    @property
    def num_colours(self) -> int:
        return len(self.colour_names)

    @property
    def num_profiles(self) -> int:
        return prod(len(cs) for cs in self.colour_sets)

    def bonus(self, i: int, c: int) -> int:
        return self._bonus[i].get(c, 0)

    def has_bonuses(self) -> bool:
        return bool(self.bonuses)

    def bonus_nodes(self) -> list[int]:
        return sorted({i for i, _, _ in self.bonuses})

    def is_unweighted(self) -> bool:
        return all(w == 1 for _, _, w in self.edges)

    def weight(self, src: int, dst: int) -> int | None:
        for j, w in self.in_edges[dst]:
            if j == src:
                return w
        return None

    def colour_id(self, name: str) -> int:
        try:
            return self.colour_names.index(name)
        except ValueError:
            raise GameError(f"unknown colour {name!r}") from None

    def strategy(self, colours: Sequence) -> Strategy:
        """Turn a sequence of colour names or ids into a validated strategy."""
        s = tuple(c if isinstance(c, int) else self.colour_id(c) for c in colours)
        check_strategy(self, s)
        return s

    def names(self, s: Sequence[int]) -> list[str]:
        return [self.colour_names[c] for c in s]

    def replace(self, **changes) -> "Game":
        fields = dict(
            num_nodes=self.num_nodes,
            edges=self.edges,
            colour_sets=self.colour_sets,
            bonuses=self.bonuses,
            colour_names=self.colour_names,
            node_labels=self.node_labels,
        )
        fields.update(changes)
        return Game(**fields)

    def profiles(self) -> Iterator[Strategy]:
        return product(*self.colour_sets)


@dataclass(frozen=True)
class Deviation:
    """Simultaneous recolouring of a coalition; ``moves`` is sorted by node."""

    moves: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, changes: Mapping[int, int] | Iterable[tuple[int, int]]) -> "Deviation":
        items = changes.items() if isinstance(changes, Mapping) else changes
        moves = tuple(sorted(items))
        if not moves:
            raise MalformedDeviation("a deviation needs a non-empty coalition")
        if len({i for i, _ in moves}) != len(moves):
            raise MalformedDeviation("a node appears twice in a deviation")
        return cls(moves)

    @property
    def coalition(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.moves)

    @property
    def new_colours(self) -> dict[int, int]:
        return dict(self.moves)

    def __len__(self) -> int:
        return len(self.moves)


@dataclass(frozen=True)
class NashVerdict:
    is_nash: bool
    node: int | None = None
    colour: int | None = None

    def __bool__(self) -> bool:
        return self.is_nash


@dataclass(frozen=True)
class EquilibriumVerdict:
    holds: bool
    witness: Deviation | None = None

    def __bool__(self) -> bool:
        return self.holds


def check_strategy(game: Game, s: Sequence[int]) -> None:
    if len(s) != game.num_nodes:
        raise GameError(f"strategy has length {len(s)}, game has {game.num_nodes} nodes")
    for i, c in enumerate(s):
        if c not in game.colour_sets[i]:
            raise GameError(f"colour {c} is not available to node {i}")


def _check_node(game: Game, i: int) -> None:
    if not (isinstance(i, int) and 0 <= i < game.num_nodes):
        raise GameError(f"invalid node id {i!r}")


def colour_payoff(game: Game, s: Sequence[int], i: int, c: int) -> int:
    """Payoff node ``i`` would get by playing ``c`` against ``s_{-i}``."""
    return game.bonus(i, c) + sum(w for j, w in game.in_edges[i] if s[j] == c)


def payoff(game: Game, s: Sequence[int], i: int) -> int:
    _check_node(game, i)
    check_strategy(game, s)
    return colour_payoff(game, s, i, s[i])


def payoffs(game: Game, s: Sequence[int]) -> tuple[int, ...]:
    check_strategy(game, s)
    return tuple(colour_payoff(game, s, i, s[i]) for i in range(game.num_nodes))


def best_responses(game: Game, s: Sequence[int], i: int) -> frozenset[int]:
    _check_node(game, i)
    values = {c: colour_payoff(game, s, i, c) for c in game.colour_sets[i]}
    top = max(values.values())
    return frozenset(c for c, v in values.items() if v == top)


def is_best_response(game: Game, s: Sequence[int], i: int) -> bool:
    current = colour_payoff(game, s, i, s[i])
    return all(colour_payoff(game, s, i, c) <= current for c in game.colour_sets[i])


def improving_colours(game: Game, s: Sequence[int], i: int) -> list[int]:
    current = colour_payoff(game, s, i, s[i])
    return [c for c in game.colour_sets[i] if colour_payoff(game, s, i, c) > current]


def is_nash(game: Game, s: Sequence[int]) -> NashVerdict:
    """Witness on failure: lowest deviating node, lowest strictly improving colour."""
    check_strategy(game, s)
    for i in range(game.num_nodes):
        better = improving_colours(game, s, i)
        if better:
            return NashVerdict(False, i, better[0])
    return NashVerdict(True)


def apply_deviation(game: Game, s: Sequence[int], d: Deviation) -> tuple[Strategy, bool]:
    check_strategy(game, s)
    new = list(s)
    for i, c in d.moves:
        _check_node(game, i)
        if c not in game.colour_sets[i]:
            raise MalformedDeviation(f"colour {c} is not available to node {i}")
        if s[i] == c:
            raise MalformedDeviation(f"node {i} already plays colour {c}")
        new[i] = c
    after = tuple(new)
    profitable = all(
        colour_payoff(game, after, i, after[i]) > colour_payoff(game, s, i, s[i])
        for i in d.coalition
    )
    return after, profitable


# -- coalition search -------------------------------------------------------


def _supported_candidates(game: Game, s: Sequence[int], c: int) -> list[int]:
    """Nodes that could join a profitable all-``c`` coalition from a Nash state.

    Every member needs a positive-weight predecessor inside the coalition that
    also moves to ``c``, so members lie on, or downstream of, a directed cycle
    of the candidate subgraph.
    """
    cand = [i for i in range(game.num_nodes) if c in game.colour_sets[i] and s[i] != c]
    inside = set(cand)
    preds = {i: [j for j, w in game.in_edges[i] if w > 0 and j in inside] for i in cand}
    # peel off nodes that can never be supported
    alive = set(cand)
    support = {i: len(preds[i]) for i in cand}
    succ: dict[int, list[int]] = {i: [] for i in cand}
    for i in cand:
        for j in preds[i]:
            succ[j].append(i)
    stack = [i for i in cand if support[i] == 0]
    while stack:
        i = stack.pop()
        if i not in alive:
            continue
        alive.discard(i)
        for k in succ[i]:
            if k in alive:
                support[k] -= 1
                if support[k] == 0:
                    stack.append(k)
    return sorted(alive)


def unicolour_fixpoint(game: Game, s: Sequence[int], c: int, members: Iterable[int]) -> list[int]:
    """Largest subset of ``members`` that profits from jointly switching to ``c``.

    Payoffs only grow when more nodes join colour ``c``, so repeatedly dropping
    members that would not gain converges to the unique maximal coalition.
    """
    base = payoffs(game, s)
    current = set(members)
    changed = True
    while changed and current:
        changed = False
        for i in sorted(current):
            gain = game.bonus(i, c) + sum(
                w for j, w in game.in_edges[i] if j in current or s[j] == c
            )
            if gain <= base[i]:
                current.discard(i)
                changed = True
    return sorted(current)


def pruned_coalition_search(game: Game, s: Sequence[int], k: int | None = None) -> Deviation | None:
    """Profitable coalition deviation from a Nash state, or ``None``.

    Restricted to coalitions that all move to one colour and whose members each
    have a same-colour predecessor inside the coalition; neither restriction
    loses completeness from a Nash equilibrium.  With ``k`` below the number of
    nodes the search enumerates candidate subsets and is exponential.
    """
    n = game.num_nodes
    k = n if k is None else k
    for c in range(game.num_colours):
        cand = _supported_candidates(game, s, c)
        if not cand:
            continue
        if k >= len(cand):
            members = unicolour_fixpoint(game, s, c, cand)
            if members:
                return Deviation.of((i, c) for i in members)
            continue
        for size in range(2, k + 1):
            for group in combinations(cand, size):
                if unicolour_fixpoint(game, s, c, group) == list(group):
                    return Deviation.of((i, c) for i in group)
    return None


def exhaustive_coalition_search(
    game: Game, s: Sequence[int], k: int | None = None, budget: int = DEFAULT_SIZE_BUDGET
) -> Deviation | None:
    """Least profitable deviation by (size, nodes, colours) over every coalition."""
    n = game.num_nodes
    k = n if k is None else k
    if game.num_profiles > budget:
        raise SizeLimitError(f"{game.num_profiles} profiles exceed the budget of {budget}")
    base = payoffs(game, s)
    for size in range(1, k + 1):
        for group in combinations(range(n), size):
            options = [[c for c in game.colour_sets[i] if c != s[i]] for i in group]
            for colours in product(*options):
                new = list(s)
                for i, c in zip(group, colours):
                    new[i] = c
                if all(colour_payoff(game, new, i, new[i]) > base[i] for i in group):
                    return Deviation.of(zip(group, colours))
    return None


def is_k_equilibrium(
    game: Game,
    s: Sequence[int],
    k: int,
    budget: int = DEFAULT_SIZE_BUDGET,
    exhaustive: bool = False,
) -> EquilibriumVerdict:
    """No coalition of at most ``k`` players can profitably deviate from ``s``.

    ``k == num_nodes`` is the strong-equilibrium test.  Non-Nash states fail
    with the unilateral witness; Nash states go through the pruned search
    unless ``exhaustive`` asks for the unfiltered enumeration.
    """
    check_strategy(game, s)
    if not 1 <= k <= game.num_nodes:
        raise GameError(f"k must lie in 1..{game.num_nodes}")
    if exhaustive:
        d = exhaustive_coalition_search(game, s, k, budget)
        return EquilibriumVerdict(d is None, d)
    verdict = is_nash(game, s)
    if not verdict:
        return EquilibriumVerdict(False, Deviation.of({verdict.node: verdict.colour}))
    if k < game.num_nodes and game.num_profiles > budget:
        raise SizeLimitError(f"{game.num_profiles} profiles exceed the budget of {budget}")
    d = pruned_coalition_search(game, s, k)
    return EquilibriumVerdict(d is None, d)


def is_strong(game: Game, s: Sequence[int]) -> bool:
    return bool(is_k_equilibrium(game, s, game.num_nodes))
