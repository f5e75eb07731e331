"""Command line: ``python -m shofa --config sim1.cfg --out sim1.csv``."""
from __future__ import annotations

import argparse
import sys

from .errors import ShofaError
from .harness import parse_config, sweep, write_csv


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="shofa", description="Run a recovery sweep and write CSV.")
    p.add_argument("--config", required=True, help="sweep config file")
    p.add_argument("--out", default="-", help="CSV output path (default stdout)")
    p.add_argument("--threads", type=int, default=1, help="worker processes per grid point")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--trials", type=int, default=None, help="override the trial count")
    args = p.parse_args(argv)
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.trials is not None:
        over["trials"] = args.trials
    try:
        with open(args.config) as fh:
            grid = parse_config(fh.read(), over)
    except OSError as exc:
        p.error(f"cannot read config {args.config}: {exc}")
    except ShofaError as exc:
        p.error(str(exc))
    results = sweep(grid, threads=max(1, args.threads))
    if args.out == "-":
        write_csv(results, sys.stdout)
        return 0
    try:
        with open(args.out, "w", newline="") as fh:
            write_csv(results, fh)
    except OSError as exc:
        print(f"shofa: cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
