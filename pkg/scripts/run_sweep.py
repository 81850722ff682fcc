"""Scheduler and c-improvement sweeps against the oracle.

    python3 scripts/run_sweep.py                     # 500 seeds per regime
    python3 scripts/run_sweep.py --seeds 50 --json out.json
"""

import argparse
import json
import sys
import time
from collections import defaultdict

from coordgames.instances import GenParams
from coordgames.sweep import C_REGIMES, SCHEDULED_REGIMES, sweep_c_regime, sweep_regime


def summarize(name, recs):
    worst = max((r.steps / r.bound for r in recs), default=0.0)
    bad = [r.seed for r in recs if not (r.passed and r.within_bound)]
    coal = sum(r.coalition_steps for r in recs)
    print(f"{name:22s} runs {len(recs):5d}  ok {len(recs) - len(bad):5d}  "
          f"max steps/bound {worst:5.2f}  coalition steps {coal:4d}  failures {bad[:5]}")
    return not bad


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=500)
    ap.add_argument("--c-seeds", type=int, default=200)
    ap.add_argument("--json")
    args = ap.parse_args()
    out = defaultdict(list)
    ok = True
    t0 = time.time()
    for regime in SCHEDULED_REGIMES:
        recs = sweep_regime(regime, range(args.seeds))
        ok &= summarize(regime, recs)
        out[regime] = [r.as_dict() for r in recs]
    weak = GenParams(num_colours=3, density=0.8, max_nodes=7)
    for cls in C_REGIMES:
        recs = sweep_c_regime(cls, range(args.c_seeds))
        ok &= summarize(f"c:{cls}", recs)
        weak_recs = sweep_c_regime(cls, range(10 * args.c_seeds), weak, starts="weak-nash")
        ok &= summarize(f"c:{cls} weak-nash", weak_recs)
        out[f"c:{cls}"] = [r.as_dict() for r in recs + weak_recs]
    print(f"done in {time.time() - t0:.1f}s, {'all passed' if ok else 'FAILURES'}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(out, fh, indent=1)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
