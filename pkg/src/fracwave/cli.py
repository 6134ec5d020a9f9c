"""fracwave <experiment> --config <path> [--output-dir DIR] [--seed N] [--threads N]

Exit status: 0 when every verdict is PASS, 1 when any is FAIL, 2 on a
configuration, IO or module error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .config import EXPERIMENTS, parse_config
from .errors import ConfigError
from .runner import RunError, run

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracwave", description="Fractional wave equation experiments.")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", required=True, type=Path, help="JSON run configuration")
    ap.add_argument("--output-dir", type=Path, help="overrides output_dir from the config")
    ap.add_argument("--seed", type=int, help="overrides seed from the config")
    ap.add_argument("--threads", type=int, help="worker threads (default: $FRACWAVE_THREADS or 1)")
    return ap


def _threads(arg) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("FRACWAVE_THREADS")
    if env is None or env == "":
        return 1
    try:
        return int(env)
    except ValueError:
        raise ConfigError([f"FRACWAVE_THREADS: not an integer ({env!r})"]) from None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        threads = _threads(args.threads)
        if threads < 1:
            raise ConfigError([f"threads: must be >= 1, got {threads}"])
        data = args.config.read_bytes()
        cfg = parse_config(data, base_dir=args.config.resolve().parent)
        if cfg.experiment != args.experiment:
            raise ConfigError([f"experiment: config says {cfg.experiment!r}, command line says {args.experiment!r}"])
        changes = {}
        if args.output_dir is not None:
            changes["output_dir"] = str(args.output_dir)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError([f"seed: must be >= 0, got {args.seed}"])
            changes["seed"] = args.seed
        if changes:
            cfg = replace(cfg, **changes)
        manifest = run(cfg, threads, data)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, RunError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for name, verdict in sorted(manifest.verdicts.items()):
        print(f"{verdict} {name}")
    print(f"manifest: {Path(cfg.output_dir) / 'manifest.json'}")
    return EXIT_PASS if manifest.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
