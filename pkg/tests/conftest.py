import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from coordgames.game import Game
from coordgames.instances import named_example

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def games(draw, max_nodes=5, max_colours=3, max_weight=3, bonuses=True):
    """Small arbitrary games (any digraph, weights, colour sets, bonuses)."""
    n = draw(st.integers(1, max_nodes))
    k = draw(st.integers(1, max_colours))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=2 * n)) if pairs else []
    edges = [(u, v, draw(st.integers(0, max_weight))) for u, v in chosen]
    sets = [
        sorted(draw(st.sets(st.integers(0, k - 1), min_size=1, max_size=k)))
        for _ in range(n)
    ]
    bon = []
    if bonuses:
        for i in range(n):
            for c in sets[i]:
                v = draw(st.integers(0, 2))
                if v:
                    bon.append((i, c, v))
    return Game.build(n, edges, sets, bon, colour_names=[chr(97 + c) for c in range(k)])


@st.composite
def game_and_strategy(draw, **kw):
    game = draw(games(**kw))
    s = tuple(draw(st.sampled_from(cs)) for cs in game.colour_sets)
    return game, s


@pytest.fixture
def fig1():
    return named_example("fig1")


@pytest.fixture
def ex2():
    return named_example("ex2").game


def triangle(colours="ab", bonus=None, weights=(1, 1, 1)):
    """3-cycle 0->1->2->0 where every node may pick any of ``colours``."""
    edges = [(0, 1, weights[0]), (1, 2, weights[1]), (2, 0, weights[2])]
    bon = [(i, c, v) for i in range(3) for c, v in (bonus or {}).items()]
    return Game.build(3, edges, [list(colours)] * 3, bon, colour_names=sorted(set(colours)))
