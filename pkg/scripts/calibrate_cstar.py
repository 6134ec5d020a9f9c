"""Record the regression constants for the randomized energy-bound families.

Runs each family once (seed 0, 50 samples), rounds the max ratio up to two
significant digits and writes src/fracwave/data/c_star.json. Rerun only when
the family or the bound definitions change on purpose; bump ``version`` then.
"""

import argparse
import json
import math
from datetime import datetime, timezone
from pathlib import Path

import fracwave
from fracwave.vws_lab import ESTIMATES, energy_bound_check

OUT = Path(__file__).resolve().parents[1] / "src" / "fracwave" / "data" / "c_star.json"


def round_up(x: float, digits: int = 2) -> float:
    scale = 10 ** (digits - 1 - math.floor(math.log10(x)))
    return math.ceil(x * scale) / scale


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--version", type=int, default=1)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()

    record = {"version": args.version, "package_version": fracwave.__version__,
              "recorded": datetime.now(timezone.utc).isoformat(timespec="seconds"),
              "seed": args.seed, "n_samples": args.samples, "c_star": {}, "observed_max": {},
              "observed_median": {}}
    for est in ESTIMATES:
        rep = energy_bound_check(est, args.samples, args.seed, workers=args.workers)
        record["c_star"][est] = round_up(rep.max_ratio)
        record["observed_max"][est] = rep.max_ratio
        record["observed_median"][est] = rep.median_ratio
        print(f"{est}: max {rep.max_ratio:.6g} median {rep.median_ratio:.6g} -> C* {record['c_star'][est]}")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(record, indent=2) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
