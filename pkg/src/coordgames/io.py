"""JSON documents for games and traces.

A game file looks like::

    {
      "format": "coordgames-game/1",
      "nodes": 3,
      "colours": ["a", "b", "c"],
      "edges": [[0, 1, 2], [1, 2, 2], [2, 0, 2]],
      "colour_sets": [["a", "b"], ["a", "c"], ["b", "c"]],
      "bonuses": [[0, "a", 1], [1, "c", 1], [2, "b", 1]]
    }

Nodes are 0-based indices.  Optional fields: ``node_labels`` (one string per
node) and ``initial`` (one colour name per node).  Bonuses may be negative;
they are shifted per node so the smallest bonus over the node's colour set
becomes zero, which leaves every best response unchanged.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from .dynamics import Trace
from .game import Game, GameError, Strategy

GAME_FORMAT = "coordgames-game/1"
TRACE_FORMAT = "coordgames-trace/1"


class ParseError(GameError):
    """Malformed input document; ``where`` names the offending field or position."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def _field(doc: dict, key: str, kind, required: bool = True):
    if key not in doc:
        if required:
            raise ParseError(key, "missing field")
        return None
    val = doc[key]
    if not isinstance(val, kind) or isinstance(val, bool):
        name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise ParseError(key, f"expected {name}, got {type(val).__name__}")
    return val


def game_from_dict(doc: Any) -> tuple[Game, Strategy | None]:
    """Validate a parsed game document and return the game and its optional initial strategy."""
    if not isinstance(doc, dict):
        raise ParseError("document", "expected a JSON object")
    fmt = doc.get("format", GAME_FORMAT)
    if fmt != GAME_FORMAT:
        raise ParseError("format", f"unsupported format {fmt!r}")
    n = _field(doc, "nodes", int)
    if n < 1:
        raise ParseError("nodes", "need at least one node")
    colours = _field(doc, "colours", list)
    if not all(isinstance(c, str) for c in colours) or len(set(colours)) != len(colours):
        raise ParseError("colours", "expected distinct colour names")
    index = {c: i for i, c in enumerate(colours)}

    def colour(where: str, c) -> int:
        if c not in index:
            raise ParseError(where, f"unknown colour {c!r}")
        return index[c]

    def node(where: str, v) -> int:
        if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
            raise ParseError(where, f"node must be an integer in 0..{n - 1}, got {v!r}")
        return v

    edges = []
    for k, e in enumerate(_field(doc, "edges", list)):
        where = f"edges[{k}]"
        if not isinstance(e, list) or len(e) not in (2, 3):
            raise ParseError(where, "expected [src, dst] or [src, dst, weight]")
        w = e[2] if len(e) == 3 else 1
        if not isinstance(w, int) or isinstance(w, bool) or w < 0:
            raise ParseError(where, "weight must be a non-negative integer")
        edges.append((node(where, e[0]), node(where, e[1]), w))

    sets_doc = _field(doc, "colour_sets", list)
    if len(sets_doc) != n:
        raise ParseError("colour_sets", f"expected {n} entries, got {len(sets_doc)}")
    sets = []
    for k, cs in enumerate(sets_doc):
        where = f"colour_sets[{k}]"
        if not isinstance(cs, list) or not cs:
            raise ParseError(where, "expected a non-empty list of colour names")
        ids = sorted({colour(where, c) for c in cs})
        sets.append(tuple(ids))

    raw: dict[tuple[int, int], int] = {}
    for k, b in enumerate(_field(doc, "bonuses", list, required=False) or []):
        where = f"bonuses[{k}]"
        if not isinstance(b, list) or len(b) != 3:
            raise ParseError(where, "expected [node, colour, value]")
        i, c = node(where, b[0]), colour(where, b[1])
        if not isinstance(b[2], int) or isinstance(b[2], bool):
            raise ParseError(where, "bonus value must be an integer")
        if c not in sets[i]:
            raise ParseError(where, f"colour {b[1]!r} is not in the colour set of node {i}")
        if (i, c) in raw:
            raise ParseError(where, "duplicate bonus entry")
        raw[(i, c)] = b[2]
    bonuses = []
    for i in range(n):
        low = min(raw.get((i, c), 0) for c in sets[i])
        shift = -low if low < 0 else 0
        for c in sets[i]:
            v = raw.get((i, c), 0) + shift
            if v:
                bonuses.append((i, c, v))

    labels = _field(doc, "node_labels", list, required=False)
    if labels is not None and (len(labels) != n or not all(isinstance(x, str) for x in labels)):
        raise ParseError("node_labels", f"expected {n} strings")
    try:
        game = Game(
            num_nodes=n,
            edges=tuple(sorted(edges)),
            colour_sets=tuple(sets),
            bonuses=tuple(sorted(bonuses)),
            colour_names=tuple(colours),
            node_labels=tuple(labels) if labels else (),
        )
    except GameError as err:
        raise ParseError("game", str(err)) from None

    init = _field(doc, "initial", list, required=False)
    initial = None
    if init is not None:
        if len(init) != n:
            raise ParseError("initial", f"expected {n} colours")
        initial = tuple(colour(f"initial[{k}]", c) for k, c in enumerate(init))
        for k, c in enumerate(initial):
            if c not in sets[k]:
                raise ParseError(f"initial[{k}]", f"colour {init[k]!r} is not available to node {k}")
    return game, initial


def game_to_dict(game: Game, initial: Sequence[int] | None = None) -> dict:
    names = game.colour_names
    doc: dict[str, Any] = {
        "format": GAME_FORMAT,
        "nodes": game.num_nodes,
        "colours": list(names),
    }
    if game.node_labels != tuple(str(i) for i in range(game.num_nodes)):
        doc["node_labels"] = list(game.node_labels)
    doc["edges"] = [[u, v, w] for u, v, w in game.edges]
    doc["colour_sets"] = [[names[c] for c in cs] for cs in game.colour_sets]
    doc["bonuses"] = [[i, names[c], v] for i, c, v in game.bonuses]
    if initial is not None:
        doc["initial"] = [names[c] for c in initial]
    return doc


def dumps_game(game: Game, initial: Sequence[int] | None = None) -> str:
    """Canonical text: one key per line, one edge / set / bonus per line."""
    doc = game_to_dict(game, initial)
    lines = ["{"]
    keys = list(doc)
    for k, key in enumerate(keys):
        val = doc[key]
        tail = "," if k < len(keys) - 1 else ""
        if key in ("edges", "colour_sets", "bonuses") and val:
            lines.append(f"  {json.dumps(key)}: [")
            for r, item in enumerate(val):
                sep = "," if r < len(val) - 1 else ""
                lines.append(f"    {json.dumps(item)}{sep}")
            lines.append(f"  ]{tail}")
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(val)}{tail}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def loads_game(text: str) -> tuple[Game, Strategy | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"line {err.lineno}, column {err.colno}", err.msg) from None
    return game_from_dict(doc)


def load_game(path: str | Path) -> tuple[Game, Strategy | None]:
    return loads_game(Path(path).read_text())


def save_game(path: str | Path, game: Game, initial: Sequence[int] | None = None) -> None:
    Path(path).write_text(dumps_game(game, initial))


def fixture_text(name: str) -> str:
    return resources.files("coordgames").joinpath("fixtures", f"{name}.json").read_text()


def load_fixture(name: str) -> tuple[Game, Strategy | None]:
    try:
        text = fixture_text(name)
    except FileNotFoundError:
        raise ParseError("fixture", f"no fixture named {name!r}") from None
    return loads_game(text)


def dumps_trace(trace: Trace, game: Game | None = None) -> str:
    return json.dumps(trace.to_dict(game), indent=1) + "\n"


def loads_trace(text: str, game: Game | None = None) -> Trace:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"line {err.lineno}, column {err.colno}", err.msg) from None
    if not isinstance(doc, dict) or doc.get("format") != TRACE_FORMAT:
        raise ParseError("format", f"expected a {TRACE_FORMAT} document")
    try:
        return Trace.from_dict(doc, game)
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError("steps", f"malformed step: {err}") from None
