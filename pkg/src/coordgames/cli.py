"""``coordgames`` command line.

Exit codes::

    0  success (equilibrium found, trace valid, file written)
    2  invalid input (unreadable or malformed game / trace / arguments)
    3  no construction is guaranteed for this instance shape
    4  the oracle proved that no (strong) Nash equilibrium exists / is reachable
    5  budget exceeded (step cap, cycle detected or oracle size limit)
    6  trace failed verification
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from scipy.sparse.csgraph import breadth_first_order

from . import dynamics
from .coalition import c_improve
from .dynamics import NotGuaranteed, Trace, improve, run_fair_random
from .game import Game, GameError, SizeLimitError, Strategy
from .graphs import Chain, Dag, PartitionCycle, SimpleCycle, classify, to_dot
from .instances import REGIMES, GenerationError, GenParams, generate
from .io import ParseError, dumps_game, dumps_trace, load_fixture, load_game, loads_trace
from .oracle import build_state_graph, verify_trace

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_GUARANTEED = 3
EXIT_NO_EQUILIBRIUM = 4
EXIT_BUDGET = 5
EXIT_INVALID_TRACE = 6

log = logging.getLogger("coordgames")


@dataclass
class RunConfig:
    subcommand: str
    game: str | None = None
    init: str = "auto"  # auto | lowest | random | file:<path> | comma-separated colour names
    seed: int = 0
    cap: int | None = None
    constants: str | None = None
    trace_out: str | None = None
    report_out: str | None = None
    dot_out: str | None = None
    verbosity: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ParseError("--seed", "seeds are 64-bit unsigned integers")


def _load(cfg: RunConfig) -> tuple[Game, Strategy | None]:
    if cfg.game is None:
        raise ParseError("game", "no game given")
    path = Path(cfg.game)
    if path.exists():
        return load_game(path)
    return load_fixture(cfg.game)


def _initial(cfg: RunConfig, game: Game, embedded: Strategy | None) -> Strategy:
    mode = cfg.init
    if mode == "auto":
        return embedded if embedded is not None else tuple(cs[0] for cs in game.colour_sets)
    if mode == "lowest":
        return tuple(cs[0] for cs in game.colour_sets)
    if mode == "random":
        rng = random.Random(cfg.seed)
        return tuple(rng.choice(cs) for cs in game.colour_sets)
    if mode.startswith("file:"):
        text = Path(mode[5:]).read_text().strip()
        names = json.loads(text) if text.startswith("[") else text.split(",")
    else:
        names = mode.split(",")
    names = [str(x).strip() for x in names]
    try:
        return game.strategy(names)
    except GameError as err:
        raise ParseError("--init", str(err)) from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
        log.info("wrote %s", path)


def _class_report(game: Game, cls) -> dict:
    out: dict = {"class": cls.tag, "nodes": game.num_nodes, "edges": len(game.edges)}
    label = game.node_labels
    if isinstance(cls, (Dag, SimpleCycle)):
        out["order"] = [label[v] for v in cls.order]
    elif isinstance(cls, Chain):
        out["m"] = cls.m
        out["cycles"] = [[label[v] for v in c] for c in cls.cycles]
        out["shared"] = [label[v] for v in cls.shared]
    elif isinstance(cls, PartitionCycle):
        out["top"] = [label[v] for v in cls.top]
        out["bottom"] = [label[v] for v in cls.bottom]
        out["cross_edges"] = sorted([label[u], label[v]] for u, v in cls.cross_edges)
    return out


def _trace_status(trace: Trace) -> int:
    return EXIT_OK if trace.verdict in ("nash", "strong") else EXIT_BUDGET


def _emit_trace(cfg: RunConfig, game: Game, trace: Trace) -> None:
    text = dumps_trace(trace, game)
    if cfg.trace_out:
        _write(cfg.trace_out, text)
    print(f"verdict: {trace.verdict}, steps: {len(trace)}")
    if cfg.verbosity:
        print("final:", ",".join(game.names(trace.final)))


def _oracle_path(game: Game, s0: Strategy) -> Trace | None:
    """Shortest improvement path from ``s0`` to a Nash state, read off the state graph."""
    report = build_state_graph(game)
    space = report.space
    start = space.index(s0)
    order, pred = breadth_first_order(report.graph, start, directed=True, return_predecessors=True)
    target = next((int(i) for i in order if space.nash_mask[i]), None)
    if target is None:
        return None
    chain = [target]
    while chain[-1] != start:
        chain.append(int(pred[chain[-1]]))
    chain.reverse()
    run = dynamics._Run(game, s0, None)
    for a, b in zip(chain, chain[1:]):
        sa, sb = space.strategy(a), space.strategy(b)
        run.move({i: sb[i] for i in range(game.num_nodes) if sa[i] != sb[i]})
    return run.trace("nash")


def cmd_classify(cfg: RunConfig) -> int:
    game, _ = _load(cfg)
    cls = classify(game)
    _write(cfg.report_out, json.dumps(_class_report(game, cls), indent=1) + "\n")
    return EXIT_OK


def cmd_solve(cfg: RunConfig) -> int:
    game, embedded = _load(cfg)
    s0 = _initial(cfg, game, embedded)
    try:
        trace = improve(game, s0, cap=cfg.cap)
    except NotGuaranteed as err:
        print(f"not guaranteed: {err}")
        if not cfg.extra.get("fallback_oracle"):
            return EXIT_NOT_GUARANTEED
        trace = _oracle_path(game, s0)
        if trace is None:
            print("oracle: no Nash equilibrium is reachable from the initial strategy")
            return EXIT_NO_EQUILIBRIUM
    _emit_trace(cfg, game, trace)
    return _trace_status(trace)


def cmd_csolve(cfg: RunConfig) -> int:
    game, embedded = _load(cfg)
    s0 = _initial(cfg, game, embedded)
    try:
        trace = c_improve(game, s0, cap=cfg.cap)
    except NotGuaranteed as err:
        print(f"not guaranteed: {err}")
        return EXIT_NOT_GUARANTEED
    _emit_trace(cfg, game, trace)
    return _trace_status(trace)


def cmd_oracle(cfg: RunConfig) -> int:
    game, embedded = _load(cfg)
    mode = cfg.extra.get("mode", "singleton")
    report = build_state_graph(game, mode, cfg.extra.get("budget"))
    summary = report.summary()
    names = game.names
    summary["nash_states"] = sorted(",".join(names(s)) for s in report.nash_states)
    summary["strong_states"] = sorted(",".join(names(s)) for s in report.strong_states)
    if embedded is not None or cfg.init != "auto":
        s0 = _initial(cfg, game, embedded)
        reach = report.reachable(s0, coalitions=False)
        summary["initial"] = ",".join(names(s0))
        summary["initial_reaches_nash"] = bool(reach & report.nash_states)
        summary["initial_reachable_states"] = len(reach)
        if mode == "full":
            c_reach = report.reachable(s0, coalitions=True)
            summary["initial_c_reaches_nash"] = bool(c_reach & report.nash_states)
    _write(cfg.report_out, json.dumps(summary, indent=1) + "\n")
    return EXIT_OK if report.nash_states else EXIT_NO_EQUILIBRIUM


def cmd_simulate(cfg: RunConfig) -> int:
    game, embedded = _load(cfg)
    s0 = _initial(cfg, game, embedded)
    trace = run_fair_random(game, s0, cfg.seed, cfg.extra.get("budget"))
    _emit_trace(cfg, game, trace)
    return _trace_status(trace)


def cmd_verify(cfg: RunConfig) -> int:
    game, _ = _load(cfg)
    trace = loads_trace(Path(cfg.extra["trace"]).read_text(), game)
    verdict = verify_trace(game, trace)
    if verdict:
        print("valid")
        return EXIT_OK
    print(f"invalid at step {verdict.index}: {verdict.reason}")
    return EXIT_INVALID_TRACE


def cmd_gen(cfg: RunConfig) -> int:
    x = cfg.extra
    params = GenParams(
        **{k: x[k] for k in ("n", "m", "num_colours", "max_weight", "max_bonus") if x.get(k) is not None}
    )
    try:
        inst = generate(x["regime"], cfg.seed, params)
    except GenerationError as err:
        raise ParseError("gen", str(err)) from None
    _write(x.get("out"), dumps_game(inst.game, inst.initial))
    return EXIT_OK


def cmd_dot(cfg: RunConfig) -> int:
    game, embedded = _load(cfg)
    s = _initial(cfg, game, embedded) if (embedded is not None or cfg.init != "auto") else None
    _write(cfg.dot_out, to_dot(game, classify(game), s))
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "solve": cmd_solve,
    "csolve": cmd_csolve,
    "oracle": cmd_oracle,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "gen": cmd_gen,
    "dot": cmd_dot,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coordgames", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def game_cmd(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("game", help="game file, or the name of a shipped example (e.g. ex2, fig4)")
        p.add_argument("--init", default="auto",
                       help="auto, lowest, random, file:PATH or comma-separated colour names")
        p.add_argument("--seed", type=int, default=0)
        return p

    p = game_cmd("classify", "detect the graph class")
    p.add_argument("--report-out")
    for name, text in (("solve", "improvement path to a Nash equilibrium"),
                       ("csolve", "c-improvement path to a strong equilibrium")):
        p = game_cmd(name, text)
        p.add_argument("--trace-out")
        p.add_argument("--cap", type=int, help="step cap (default: 10x the calibrated bound)")
        p.add_argument("--constants", help="bound constants file")
        if name == "solve":
            p.add_argument("--fallback-oracle", action="store_true",
                           help="use the state-space oracle when no construction applies")
    p = game_cmd("oracle", "exhaustive equilibrium and reachability report")
    p.add_argument("--mode", choices=("singleton", "full"), default="singleton")
    p.add_argument("--budget", type=int)
    p.add_argument("--report-out")
    p = game_cmd("simulate", "fair random best-response dynamics")
    p.add_argument("--budget", type=int, help="step budget (default 10 x number of joint strategies)")
    p.add_argument("--trace-out")
    p = game_cmd("verify", "replay and check a trace")
    p.add_argument("trace")
    p = sub.add_parser("gen", help="write a random instance")
    p.add_argument("regime", choices=REGIMES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--num-colours", type=int)
    p.add_argument("--max-weight", type=int)
    p.add_argument("--max-bonus", type=int)
    p.add_argument("-o", "--out")
    p = game_cmd("dot", "Graphviz export")
    p.add_argument("-o", "--dot-out")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    known = {"subcommand", "game", "init", "seed", "cap", "constants", "trace_out",
             "report_out", "dot_out", "verbose"}
    extra = {k: v for k, v in vars(ns).items() if k not in known}
    return RunConfig(
        subcommand=ns.subcommand,
        game=getattr(ns, "game", None),
        init=getattr(ns, "init", "auto"),
        seed=ns.seed,
        cap=getattr(ns, "cap", None),
        constants=getattr(ns, "constants", None),
        trace_out=getattr(ns, "trace_out", None),
        report_out=getattr(ns, "report_out", None),
        dot_out=getattr(ns, "dot_out", None),
        verbosity=ns.verbose,
        extra=extra,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.DEBUG if ns.verbose > 1 else logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(ns)
        if cfg.constants:
            dynamics._CONSTANTS = dynamics.load_constants(cfg.constants)
        return COMMANDS[cfg.subcommand](cfg)
    except (GameError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except SizeLimitError as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
