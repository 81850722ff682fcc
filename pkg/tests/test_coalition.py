import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coordgames.coalition import (
    CoalitionCandidate,
    EmbeddingError,
    PreconditionError,
    c_improve,
    c_improve_closed_chain,
    chain_cycles,
    close_open_chain,
    find_profitable_coalition_from_nash,
    has_unicolour_cycle,
)
from coordgames.dynamics import NotGuaranteed
from coordgames.game import Deviation, GameError, apply_deviation, payoffs
from coordgames.graphs import Digraph, classify, detect_chain, verify_chain
from coordgames.instances import GenParams, generate, named_example
from coordgames.oracle import enumerate_nash, enumerate_strong, verify_trace

from conftest import triangle

SMALL = GenParams(max_nodes=7, num_colours=3, density=0.8, max_profiles=800)


def weak_nash(game):
    return sorted(enumerate_nash(game) - enumerate_strong(game))


def test_triangle_all_move_together():
    g = triangle("ab", bonus={"b": 1})
    trace = c_improve(g, (0, 0, 0))
    assert trace.verdict == "strong" and trace.final == (1, 1, 1)
    assert len(trace.coalition_steps()) == 1
    assert verify_trace(g, trace)


def test_strong_start_takes_no_coalition_step():
    g = triangle("ab", bonus={"b": 1})
    trace = c_improve(g, (1, 1, 1))
    assert len(trace) == 0 and trace.verdict == "strong"


def test_simple_cycle_candidate_is_whole_cycle():
    g = triangle("ab", bonus={"b": 1})
    d = find_profitable_coalition_from_nash(g, (0, 0, 0), classify(g))
    assert d == Deviation.of({0: 1, 1: 1, 2: 1})


def test_precondition_on_non_nash():
    g = triangle("ab")
    with pytest.raises(PreconditionError):
        find_profitable_coalition_from_nash(g, (0, 1, 1), classify(g))


def test_fig4_after_first_switch():
    inst = named_example("fig4")
    g, s = inst.game, list(inst.initial)
    s[0] = g.colour_id("b")
    s = tuple(s)
    d = find_profitable_coalition_from_nash(g, s, classify(g), require_nash=False)
    c = g.colour_id("c")
    assert d in (Deviation.of({1: c}), Deviation.of({1: c, 2: c}))
    _, ok = apply_deviation(g, s, d)
    assert ok


def test_candidate_check():
    g = triangle("ab")
    CoalitionCandidate((0, 1, 2), 1).check(g)
    with pytest.raises(GameError):
        CoalitionCandidate((0, 2, 1), 1).check(g)


def test_ring_cycles_of_closed_chain():
    cycles = [(0, 3, 1), (1, 4, 2), (2, 5, 0)]
    edges = [(a, b) for c in cycles for a, b in zip(c, c[1:] + c[:1])]
    d = Digraph.from_edges(6, edges)
    ch = detect_chain(d)
    found = chain_cycles(ch)
    assert len(found) == ch.m + 2
    for cyc in found:
        assert all((a, b) in d.edge_set() for a, b in zip(cyc, cyc[1:] + cyc[:1]))


def test_unicolour_cycle_witness():
    g = triangle("ab")
    assert has_unicolour_cycle(g, Deviation.of({0: 1, 1: 1, 2: 1}))
    assert not has_unicolour_cycle(g, Deviation.of({0: 1, 1: 1}))
    assert not has_unicolour_cycle(g, Deviation.of({0: 1, 1: 0, 2: 1}))


@pytest.mark.parametrize("regime", ["cycle-two-bonus", "cycle-two-weight", "cycle-unweighted", "open-chain", "closed-chain"])
@given(seed=st.integers(0, 10**6))
def test_c_improve_ends_strong(regime, seed):
    game = generate(regime, seed, SMALL).game
    payload = classify(game)
    strong = enumerate_strong(game)
    starts = list(itertools.islice(game.profiles(), 60)) + weak_nash(game)
    for s0 in starts:
        trace = c_improve(game, s0, payload)
        assert trace.verdict == "strong" and trace.final in strong
        assert verify_trace(game, trace)
        limit = 1 if regime.startswith("cycle") else payload.m
        multi = trace.coalition_steps()
        assert len(multi) <= limit
        assert all(has_unicolour_cycle(game, st.deviation) for st in multi)


def test_weak_nash_starts_use_coalitions():
    used = 0
    for seed in range(300):
        game = generate("closed-chain", seed, SMALL).game
        for s0 in weak_nash(game):
            trace = c_improve(game, s0)
            assert trace.final in enumerate_strong(game)
            used += len(trace.coalition_steps()) > 0
    assert used > 0


def test_frozen_cycles_stay_frozen():
    for seed in range(300):
        game = generate("closed-chain", seed, SMALL).game
        for s0 in weak_nash(game):
            trace = c_improve(game, s0)
            for k, nodes in trace.measures.get("frozen", []):
                for later in trace.steps[k + 1:]:
                    assert not set(later.deviation.coalition) & set(nodes)


def test_closing_embedding_keeps_payoffs():
    for seed in range(40):
        game = generate("open-chain", seed, SMALL).game
        chain = classify(game)
        emb = close_open_chain(game, chain)
        assert verify_chain(emb.game, emb.chain) is None and emb.chain.closed
        star = emb.game.num_colours - 1
        for s in itertools.islice(game.profiles(), 30):
            ext = payoffs(emb.game, tuple(s) + (star, star))
            assert ext[: game.num_nodes] == payoffs(game, s)


def test_embedding_rejects_closed_chain():
    game = generate("closed-chain", 0).game
    with pytest.raises(EmbeddingError):
        close_open_chain(game, classify(game))


def test_closed_chain_with_bonus_not_guaranteed():
    game = generate("closed-chain", 0).game
    game = game.replace(bonuses=((0, game.colour_sets[0][0], 1),))
    with pytest.raises(NotGuaranteed):
        c_improve_closed_chain(game, classify(game), tuple(cs[0] for cs in game.colour_sets))


def test_no_construction_for_partition_cycles():
    game = named_example("fig2").game
    with pytest.raises(NotGuaranteed):
        c_improve(game, tuple(cs[0] for cs in game.colour_sets))

