import pytest
from hypothesis import given
from hypothesis import strategies as st

from coordgames.game import (
    Deviation,
    Game,
    GameError,
    MalformedDeviation,
    SizeLimitError,
    apply_deviation,
    best_responses,
    exhaustive_coalition_search,
    improving_colours,
    is_k_equilibrium,
    is_nash,
    is_strong,
    payoff,
    payoffs,
    pruned_coalition_search,
    unicolour_fixpoint,
)

from conftest import game_and_strategy, games, triangle


def test_build_accepts_names_and_defaults_weight():
    g = Game.build(2, [(0, 1)], [["x", "y"], ["y"]], {(1, "y"): 2}, colour_names=["x", "y"])
    assert g.edges == ((0, 1, 1),)
    assert g.colour_sets == ((0, 1), (1,))
    assert g.bonus(1, 1) == 2 and g.bonus(0, 0) == 0
    assert g.num_profiles == 2


@pytest.mark.parametrize(
    "kwargs, msg",
    [
        (dict(num_nodes=2, edges=((0, 0, 1),), colour_sets=((0,), (0,))), "self loop"),
        (dict(num_nodes=2, edges=((0, 1, 1), (0, 1, 2)), colour_sets=((0,), (0,))), "parallel"),
        (dict(num_nodes=2, edges=((0, 5, 1),), colour_sets=((0,), (0,))), "outside"),
        (dict(num_nodes=2, edges=((0, 1, -1),), colour_sets=((0,), (0,))), "weight"),
        (dict(num_nodes=2, edges=(), colour_sets=((0,), ())), "empty colour set"),
        (dict(num_nodes=1, edges=(), colour_sets=((0,),), bonuses=((0, 1, 1),)), "not available"),
    ],
)
def test_malformed_games_are_rejected(kwargs, msg):
    with pytest.raises(GameError, match=msg):
        Game(**kwargs)


def test_fig1_payoffs(fig1):
    got = payoffs(fig1.game, fig1.initial)
    assert got == (0, 1, 2, 1, 1, 1, 0, 0, 0)


def test_fig1_node1_switch_to_a(fig1):
    g, s = fig1.game, fig1.initial
    a = g.colour_id("a")
    assert a in improving_colours(g, s, 0)
    verdict = is_nash(g, s)
    assert not verdict
    s2, ok = apply_deviation(g, s, Deviation.of({0: a}))
    assert ok and payoff(g, s2, 0) == 1


def test_strategy_length_checked(ex2):
    with pytest.raises(GameError):
        payoffs(ex2, (0, 0))


def test_colour_outside_set_is_rejected(ex2):
    # node 0 may only pick a or b
    c = ex2.colour_id("c")
    with pytest.raises(GameError):
        apply_deviation(ex2, (0, 0, 1), Deviation.of({0: c}))


def test_deviation_needs_distinct_nodes():
    with pytest.raises(MalformedDeviation):
        Deviation.of([(0, 1), (0, 2)])
    with pytest.raises(MalformedDeviation):
        Deviation.of({})


def test_unanimous_switch_is_strong_deviation_not_unilateral():
    # all-a on a unit triangle where b is worth exactly one more: Nash but not strong
    g = triangle("ab", bonus={"b": 1})
    s = (0, 0, 0)
    assert is_nash(g, s)
    assert not is_strong(g, s)
    d = pruned_coalition_search(g, s)
    assert d is not None and d.coalition == (0, 1, 2)
    assert is_strong(g, (1, 1, 1))


def test_k_equilibrium_levels():
    g = triangle("ab", bonus={"b": 1})
    s = (0, 0, 0)
    assert is_k_equilibrium(g, s, 1)
    assert is_k_equilibrium(g, s, 2)
    verdict = is_k_equilibrium(g, s, 3)
    assert not verdict and set(verdict.witness.coalition) == {0, 1, 2}


def test_k_out_of_range(ex2):
    with pytest.raises(GameError):
        is_k_equilibrium(ex2, (0, 0, 1), 4)


def test_exhaustive_search_respects_budget(ex2):
    with pytest.raises(SizeLimitError):
        exhaustive_coalition_search(ex2, (0, 0, 1), budget=4)


def test_fixpoint_drops_unsupported_members():
    g = triangle("ab", bonus={"b": 1})
    # node 2 alone would not gain, so the group {2} collapses
    assert unicolour_fixpoint(g, (0, 0, 0), 1, [2]) == []
    assert unicolour_fixpoint(g, (0, 0, 0), 1, [0, 1, 2]) == [0, 1, 2]


@given(game_and_strategy())
def test_best_responses_are_maximal(gs):
    game, s = gs
    for i in range(game.num_nodes):
        br = best_responses(game, s, i)
        vals = {c: payoff(game, s[:i] + (c,) + s[i + 1:], i) for c in game.colour_sets[i]}
        assert br == {c for c, v in vals.items() if v == max(vals.values())}


@given(game_and_strategy())
def test_nash_iff_no_improving_colour(gs):
    game, s = gs
    assert bool(is_nash(game, s)) == all(not improving_colours(game, s, i) for i in range(game.num_nodes))


@given(game_and_strategy(), st.integers(0, 3))
def test_uniform_bonus_shift_keeps_best_responses(gs, shift):
    game, s = gs
    bon = {(i, c): game.bonus(i, c) + shift for i in range(game.num_nodes) for c in game.colour_sets[i]}
    shifted = Game.build(game.num_nodes, game.edges, game.colour_sets, bon, game.colour_names)
    for i in range(game.num_nodes):
        assert best_responses(game, s, i) == best_responses(shifted, s, i)


@given(game_and_strategy(max_nodes=4))
def test_pruned_search_matches_exhaustive_at_nash(gs):
    game, s = gs
    if not is_nash(game, s):
        return
    pruned = pruned_coalition_search(game, s)
    full = exhaustive_coalition_search(game, s)
    assert (pruned is None) == (full is None)
    if pruned is not None:
        _, ok = apply_deviation(game, s, pruned)
        assert ok


@given(games(max_nodes=4))
def test_strong_implies_nash(game):
    for s in game.profiles():
        if is_strong(game, s):
            assert is_nash(game, s)
