"""Recompute the step-bound constants and write them into the package.

    python3 scripts/calibrate_bounds.py            # rewrite src/coordgames/constants.json
    python3 scripts/calibrate_bounds.py --check    # exit 1 if the shipped file differs
"""

import argparse
import json
import sys
import time
from pathlib import Path

from coordgames.calibration import calibrate, write_constants

TARGET = Path(__file__).resolve().parents[1] / "src" / "coordgames" / "constants.json"


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true")
    ap.add_argument("--out", default=str(TARGET))
    args = ap.parse_args()
    start = time.time()
    data = calibrate(report=lambda kind, r: print(f"{kind:24s} worst ratio {str(r):>10s}  ({time.time() - start:.1f}s)"))
    print(f"calibrated in {time.time() - start:.1f}s: {data['K']}")
    if args.check:
        shipped = json.loads(Path(args.out).read_text())
        if shipped != data:
            print("constants file is out of date")
            return 1
        print("constants file matches")
        return 0
    write_constants(args.out, data)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
