import json

import pytest
from hypothesis import given

from coordgames.dynamics import improve
from coordgames.game import best_responses
from coordgames.instances import EXAMPLE_NAMES, generate, named_example
from coordgames.io import (
    ParseError,
    dumps_game,
    dumps_trace,
    game_from_dict,
    load_fixture,
    loads_game,
    loads_trace,
)

from conftest import game_and_strategy


@pytest.mark.parametrize("name", EXAMPLE_NAMES)
def test_fixtures_match_builders(name):
    inst = named_example(name)
    game, initial = load_fixture(name)
    assert game == inst.game
    assert initial == inst.initial


@given(game_and_strategy())
def test_round_trip(gs):
    game, s = gs
    back, init = loads_game(dumps_game(game, s))
    assert back == game and init == s


def test_text_is_canonical():
    game = named_example("fig2").game
    text = dumps_game(game)
    assert dumps_game(loads_game(text)[0]) == text
    assert '    [0, 1, 1],' in text


def base_doc():
    return {
        "format": "coordgames-game/1",
        "nodes": 3,
        "colours": ["a", "b"],
        "edges": [[0, 1], [1, 2, 2], [2, 0]],
        "colour_sets": [["a", "b"], ["a"], ["b", "a"]],
        "bonuses": [[0, "b", 1]],
    }


def test_minimal_document():
    game, init = game_from_dict(base_doc())
    assert game.edges == ((0, 1, 1), (1, 2, 2), (2, 0, 1))
    assert game.colour_sets[2] == (0, 1)
    assert init is None


@pytest.mark.parametrize(
    "patch, where",
    [
        ({"format": "other/9"}, "format"),
        ({"nodes": 0}, "nodes"),
        ({"nodes": "3"}, "nodes"),
        ({"colours": ["a", "a"]}, "colours"),
        ({"edges": [[0, 7]]}, "edges[0]"),
        ({"edges": [[0, 1, -2]]}, "edges[0]"),
        ({"edges": [[0, 0]]}, "game"),
        ({"colour_sets": [["a"], ["a"]]}, "colour_sets"),
        ({"colour_sets": [["a"], [], ["a"]]}, "colour_sets[1]"),
        ({"colour_sets": [["a"], ["z"], ["a"]]}, "colour_sets[1]"),
        ({"bonuses": [[1, "b", 1]]}, "bonuses[0]"),
        ({"bonuses": [[0, "b", 1], [0, "b", 2]]}, "bonuses[1]"),
        ({"initial": ["a", "b", "a"]}, "initial[1]"),
        ({"node_labels": ["x"]}, "node_labels"),
    ],
)
def test_malformed_documents_name_the_field(patch, where):
    doc = {**base_doc(), **patch}
    with pytest.raises(ParseError) as err:
        game_from_dict(doc)
    assert err.value.where == where


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as err:
        loads_game('{"nodes": 3,\n "colours": [}')
    assert err.value.where.startswith("line 2")


def test_negative_bonuses_are_shifted():
    doc = {**base_doc(), "bonuses": [[0, "a", -2], [0, "b", 1]]}
    game, _ = game_from_dict(doc)
    assert (game.bonus(0, 0), game.bonus(0, 1)) == (0, 3)
    for s in game.profiles():
        ref, _ = game_from_dict({**base_doc(), "bonuses": [[0, "b", 3]]})
        assert best_responses(game, s, 0) == best_responses(ref, s, 0)


def test_trace_round_trip():
    game = generate("closed-chain", 4).game
    trace = improve(game, tuple(cs[-1] for cs in game.colour_sets))
    text = dumps_trace(trace, game)
    doc = json.loads(text)
    assert doc["num_steps"] == len(trace)
    back = loads_trace(text, game)
    assert back.steps == trace.steps and back.final == trace.final


def test_trace_format_checked():
    with pytest.raises(ParseError):
        loads_trace('{"format": "nope"}')
