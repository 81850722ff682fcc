import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coordgames.dynamics import (
    NotGuaranteed,
    TieBreak,
    TieContext,
    TieContextError,
    Trace,
    bound_parameters,
    bound_shape,
    choose_best_response,
    constants,
    cycle_regime,
    improve,
    improve_closed_chain,
    improve_open_chain,
    run_fair_random,
    step_best_response,
    step_bound,
)
from coordgames.game import Game, best_responses, is_nash
from coordgames.graphs import classify
from coordgames.instances import GenParams, generate, named_example
from coordgames.oracle import enumerate_nash, verify_trace

from conftest import triangle

SMALL = GenParams(max_nodes=7, num_colours=3, max_profiles=800)
SCHEDULED = [
    "dag", "cycle-two-bonus", "cycle-two-weight", "cycle-unweighted",
    "open-chain", "open-chain-weighted", "closed-chain",
    "pc-plain", "pc-bonus", "pc-weighted", "pc-weighted-bonus",
]


@pytest.mark.parametrize("regime", SCHEDULED)
@given(seed=st.integers(0, 10**6))
def test_every_start_reaches_an_oracle_nash(regime, seed):
    game = generate(regime, seed, SMALL).game
    payload = classify(game)
    nash = enumerate_nash(game)
    for s0 in itertools.islice(game.profiles(), 200):
        trace = improve(game, s0, payload)
        assert trace.verdict == "nash"
        assert trace.final in nash
        assert verify_trace(game, trace)


def test_scheduler_is_deterministic():
    game = generate("pc-bonus", 11).game
    s0 = tuple(cs[-1] for cs in game.colour_sets)
    a, b = improve(game, s0), improve(game, s0)
    assert a.steps == b.steps and a.measures == b.measures


def test_nash_start_takes_no_steps():
    game = generate("closed-chain", 2).game
    s = next(iter(enumerate_nash(game)))
    assert len(improve(game, s)) == 0


def test_dag_single_pass():
    game = generate("dag", 5).game
    for s0 in itertools.islice(game.profiles(), 100):
        assert len(improve(game, s0)) <= game.num_nodes


@pytest.mark.parametrize(
    "name, citation",
    [("ex2", "fixture ex2"), ("ex6", "fixture ex6"), ("fig3", "fixture fig3"), ("fig1", "outside")],
)
def test_not_guaranteed(name, citation):
    game = named_example(name).game
    s0 = tuple(cs[0] for cs in game.colour_sets)
    with pytest.raises(NotGuaranteed, match=citation):
        improve(game, s0)


def test_weighted_chain_with_bonus_not_guaranteed():
    game = generate("open-chain-weighted", 1).game
    game = game.replace(bonuses=((0, game.colour_sets[0][0], 1),))
    with pytest.raises(NotGuaranteed):
        improve_open_chain(game, classify(game), tuple(cs[0] for cs in game.colour_sets))


def test_weighted_closed_chain_not_guaranteed():
    game = generate("closed-chain", 1).game
    u, v, _ = game.edges[0]
    game = game.replace(edges=((u, v, 2),) + game.edges[1:])
    with pytest.raises(NotGuaranteed):
        improve_closed_chain(game, classify(game), tuple(cs[0] for cs in game.colour_sets))


def test_cycle_regimes():
    assert cycle_regime(triangle("ab", {"a": 1}), (0, 1, 2)) == "a"
    g = triangle("ab", weights=(2, 1, 1))
    assert cycle_regime(g, (0, 1, 2)) == "b"
    with pytest.raises(NotGuaranteed):
        cycle_regime(named_example("ex2").game, (0, 1, 2))


def test_cap_stops_run():
    game = generate("cycle-unweighted", 4).game
    s0 = next(s for s in game.profiles() if len(improve(game, s)) >= 2)
    trace = improve(game, s0, cap=1)
    assert trace.verdict == "budget" and len(trace) == 1


def test_open_chain_progress_strictly_increases():
    for seed in range(30):
        game = generate("open-chain", seed, SMALL).game
        for s0 in itertools.islice(game.profiles(), 60):
            prog = [tuple(p) for p in improve(game, s0).measures["progress"]]
            assert all(a < b for a, b in zip(prog, prog[1:])), (seed, s0, prog)


def test_weighted_open_chain_invariant():
    for seed in range(30):
        game = generate("open-chain-weighted", seed, SMALL).game
        for s0 in itertools.islice(game.profiles(), 60):
            trace = improve(game, s0)
            assert all(trace.measures.get("invariant_one", [True]))


def test_fig2_reaches_nash_from_every_start():
    game = named_example("fig2").game
    nash = enumerate_nash(game)
    for s0 in game.profiles():
        assert improve(game, s0).final in nash


def test_tie_policies_pick_best_responses():
    g = triangle("abc")
    s = (0, 1, 2)
    br = best_responses(g, s, 1)
    for tie in (TieBreak.LOWEST, TieBreak.PREFER_CURRENT, TieBreak.PREFER_PREDECESSOR):
        assert choose_best_response(g, s, 1, tie) in br
    ctx = TieContext(predecessor=0, top_preds=())
    for tie in (TieBreak.P1, TieBreak.P2, TieBreak.P3):
        assert choose_best_response(g, s, 1, tie, ctx) in br


def test_prefer_predecessor_copies_predecessor():
    g = triangle("abc")
    # node 1 sees node 0 on c, node 2 on b: c is the unique best response anyway
    assert choose_best_response(g, (2, 0, 1), 1, TieBreak.PREFER_PREDECESSOR) == 2
    # a tie between a and c at node 1 is broken towards the predecessor
    g2 = Game.build(3, [(0, 1), (2, 1)], [["a", "c"], ["a", "c"], ["a"]], colour_names=["a", "c"])
    assert choose_best_response(g2, (1, 0, 0), 1, TieBreak.PREFER_PREDECESSOR, TieContext(0)) == 1


def test_partition_policies_need_context():
    g = triangle("ab")
    with pytest.raises(TieContextError):
        step_best_response(g, (0, 1, 0), 1, TieBreak.P1)


def test_step_best_response_keeps_br():
    g = triangle("ab")
    s = (0, 0, 0)
    assert step_best_response(g, s, 1) == (s, False)


def test_bound_shapes():
    assert bound_shape("cycle", n=7) == 7
    assert bound_shape("open_chain", n=4, m=3) == 36
    assert bound_shape("weighted_open_chain", n=4, m=3) == 108
    assert bound_shape("partition_cycle", n=8, k=5) == 24
    assert bound_shape("partition_cycle_bonus", n=8, k=5) == 120
    assert step_bound("cycle", n=7) == constants()["cycle"] * 7
    with pytest.raises(ValueError):
        bound_shape("tree", n=3)


def test_bound_parameters_follow_expansion():
    inst = generate("pc-weighted", 3)
    kind, size = bound_parameters(inst.game, classify(inst.game))
    assert kind == "partition_cycle"
    assert size["n"] == inst.truth["expanded_nodes"]


def test_trace_round_trip():
    game = generate("pc-plain", 2).game
    trace = improve(game, tuple(cs[0] for cs in game.colour_sets))
    back = Trace.from_dict(trace.to_dict(game), game)
    assert back.steps == trace.steps and back.initial == trace.initial
    assert back.verdict == trace.verdict


def test_fair_random_no_equilibrium_runs_out():
    game = named_example("ex2").game
    trace = run_fair_random(game, (0, 0, 1), seed=3, step_budget=50)
    assert trace.verdict == "budget" and len(trace) == 50


@given(st.integers(0, 2**32))
def test_fair_random_deterministic_and_sound(seed):
    game = generate("cycle-unweighted", seed % 50).game
    s0 = tuple(cs[0] for cs in game.colour_sets)
    a = run_fair_random(game, s0, seed)
    assert a.steps == run_fair_random(game, s0, seed).steps
    assert verify_trace(game, a)
    if a.verdict == "nash":
        assert is_nash(game, a.final)


@st.composite
def cycle_games(draw):
    """Cycles in one of the three covered regimes, built directly rather than generated."""
    n = draw(st.integers(3, 6))
    regime = draw(st.sampled_from("abc"))
    sets = [sorted(draw(st.sets(st.integers(0, 2), min_size=1, max_size=3))) for _ in range(n)]
    if regime == "a":
        weights = [1] * n
        holders = range(n)
    elif regime == "b":
        weights = [draw(st.integers(1, 4)) for _ in range(n)]
        holders = draw(st.lists(st.integers(0, n - 1), unique=True, max_size=2))
    else:
        weights = [1] * n
        for i in draw(st.lists(st.integers(0, n - 1), unique=True, max_size=2)):
            weights[i] = draw(st.integers(2, 4))
        holders = range(n)
    bon = [(i, c, draw(st.integers(0, 3))) for i in holders for c in sets[i]]
    edges = [(i, (i + 1) % n, weights[i]) for i in range(n)]
    return Game.build(n, edges, sets, bon, colour_names=["a", "b", "c"])


@given(cycle_games(), st.data())
def test_cycle_scheduler_on_arbitrary_regime_instances(game, data):
    s0 = tuple(data.draw(st.sampled_from(cs)) for cs in game.colour_sets)
    trace = improve(game, s0)
    assert trace.verdict == "nash" and trace.final in enumerate_nash(game)
    kind, size = bound_parameters(game, classify(game))
    assert len(trace) <= step_bound(kind, **size)
