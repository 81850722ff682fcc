"""Look for games on graphs of indegree at most two without a Nash equilibrium.

Whether every such game has a Nash equilibrium is open; this only reports
what the oracle finds on random small instances and asserts nothing.

    python3 scripts/probe_indegree_two.py --games 2000 --max-nodes 7
"""

import argparse
import random
import sys

from coordgames.game import Game
from coordgames.graphs import classify
from coordgames.io import dumps_game
from coordgames.oracle import build_state_graph


def random_game(rng: random.Random, max_nodes: int, colours: int, weighted: bool) -> Game:
    n = rng.randint(3, max_nodes)
    edges = []
    for v in range(n):
        for u in rng.sample([u for u in range(n) if u != v], rng.randint(1, 2)):
            edges.append((u, v, rng.randint(1, 3) if weighted else 1))
    sets = []
    for _ in range(n):
        cs = [c for c in range(colours) if rng.random() < 0.6]
        sets.append(cs or [rng.randrange(colours)])
    bonuses = [(i, c, rng.randint(1, 2)) for i in range(n) for c in sets[i] if rng.random() < 0.3]
    return Game.build(n, edges, sets, bonuses, colour_names=[chr(97 + c) for c in range(colours)])


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--games", type=int, default=1000)
    ap.add_argument("--max-nodes", type=int, default=7)
    ap.add_argument("--colours", type=int, default=3)
    ap.add_argument("--weighted", action="store_true")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--dump", help="write the first game without a Nash equilibrium here")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    no_ne = not_wa = 0
    by_class: dict[str, int] = {}
    for _ in range(args.games):
        game = random_game(rng, args.max_nodes, args.colours, args.weighted)
        report = build_state_graph(game)
        tag = classify(game).tag
        by_class[tag] = by_class.get(tag, 0) + 1
        if not report.nash_states:
            no_ne += 1
            if args.dump and no_ne == 1:
                with open(args.dump, "w") as fh:
                    fh.write(dumps_game(game))
        elif not report.weakly_acyclic:
            not_wa += 1
    print(f"{args.games} games (indegree <= 2, {'weighted' if args.weighted else 'unit weights'})")
    print(f"  classes: {by_class}")
    print(f"  without a Nash equilibrium: {no_ne}")
    print(f"  with one but not weakly acyclic: {not_wa}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
