"""Command-line driver for the numerical experiments.

Exit status: 0 when every pass flag holds, 1 when any fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import sys

from .experiments import EXPERIMENTS, UsageError, run


def _parse_params(pairs: list[str]) -> dict:
    params = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise UsageError(f"expected key=value, got {pair!r}")
        params[key.strip().replace("-", "_")] = value.strip()
    return params


def write_rows_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lqcsym",
        description="Run a numerical experiment on invariant connections and print a JSON report.",
    )
    parser.add_argument("--experiment", "-e", help="experiment name (see --list)")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    parser.add_argument("--csv", help="write ladder rows as CSV")
    parser.add_argument(
        "--param", "-p", action="extend", nargs="+", default=[], metavar="KEY=VALUE",
        help="override an experiment parameter; repeatable",
    )
    parser.add_argument("--include-timing", action="store_true", help="add wall_time to the report")
    parser.add_argument("--list", action="store_true", help="list experiments with their defaults")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list:
        for name, (_, defaults) in sorted(EXPERIMENTS.items()):
            opts = " ".join(f"{k}={v}" for k, v in defaults.items())
            print(f"{name:24s} {opts}")
        return 0
    if not args.experiment:
        parser.print_usage(sys.stderr)
        print("lqcsym: error: --experiment is required", file=sys.stderr)
        return 2
    try:
        report = run(args.experiment, _parse_params(args.param), args.seed)
    except UsageError as exc:
        print(f"lqcsym: error: {exc}", file=sys.stderr)
        return 2
    text = report.to_json(include_timing=args.include_timing)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv:
        write_rows_csv(args.csv, report.rows)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
