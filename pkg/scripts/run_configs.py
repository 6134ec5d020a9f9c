"""Run every configs/*.json through the experiment runner and tabulate verdicts."""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from fracwave.config import parse_config
from fracwave.runner import run

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--output-root", type=Path, default=Path("runs"))
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()
    failed = 0
    for path in sorted(CONFIGS.glob("*.json")):
        data = path.read_bytes()
        cfg = parse_config(data, base_dir=CONFIGS)
        cfg = replace(cfg, output_dir=str(args.output_root / path.stem))
        man = run(cfg, args.threads, data)
        verdicts = " ".join(f"{k}={v}" for k, v in sorted(man.verdicts.items())) or "(no verdicts)"
        print(f"{path.stem:<28} {verdicts}")
        failed += not man.passed
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
