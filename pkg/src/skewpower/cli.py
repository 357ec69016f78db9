"""Command line interface: build a ring tower, evaluate expressions, run suites.

Exit status: 0 when every case passes, 1 when any case fails, 2 on a
configuration or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, RingTowerConfig, Tower, build_tower, parse_config
from .expr import ExpressionError
from .filtered import RingError
from .series import PrecisionError, SeriesRing, TruncSeries, render
from .suites import SUITES, Record, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def eval_expression(tower: Tower, text: str) -> str:
    """Evaluate over the top ring; series results carry their precision tag."""
    R = tower.top
    value = R.parse(text)
    if isinstance(R, SeriesRing):
        return render(TruncSeries(R, value))
    return R.format(value)


def format_record(rec: Record) -> str:
    line = f"{rec.status.upper():7s} {rec.suite} {rec.case} ({rec.micros} us)"
    if rec.witness:
        line += f"  {rec.witness}"
    return line


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="skewpower",
        description="Skew power series ring towers: evaluate expressions and run verification suites.",
    )
    p.add_argument("--config", required=True, type=Path, help="ring-tower configuration file")
    p.add_argument(
        "--suite",
        action="append",
        help=f"suite to run (repeatable; 'all' runs every suite). Known: {', '.join(SUITES)}",
    )
    p.add_argument("--eval", dest="expr", help="expression to evaluate in the top ring")
    p.add_argument("--report", choices=("text", "jsonl"), default="text")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--budget", type=int, help="override the element budget for exhaustive searches")
    return p


def load(args) -> tuple[RingTowerConfig, Tower]:
    try:
        text = args.config.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from None
    cfg = parse_config(text)
    if args.seed is not None:
        cfg.budget["seed"] = args.seed
    if args.budget is not None:
        cfg.budget["elements"] = args.budget
    return cfg, build_tower(cfg)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        cfg, tower = load(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.expr is not None:
        try:
            result = eval_expression(tower, args.expr)
        except (ExpressionError, RingError, PrecisionError) as exc:
            print(f"eval error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        if args.report == "jsonl":
            print(json.dumps({"expression": args.expr, "result": result}), file=out)
        else:
            print(result, file=out)
        if not args.suite:
            return EXIT_OK

    names = args.suite or cfg.suites
    if not names:
        print("nothing to do: give --eval or --suite, or a [suite] section", file=sys.stderr)
        return EXIT_CONFIG
    if "all" in names:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        print(f"unknown suite {unknown[0]!r}; known: {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_CONFIG

    records: list[Record] = []
    for name in names:
        records.extend(run_suite(tower, name))
    for rec in records:
        if args.report == "jsonl":
            print(json.dumps(rec.as_dict()), file=out)
        else:
            print(format_record(rec), file=out)
    failed = sum(r.status == "fail" for r in records)
    if args.report == "text":
        passed = sum(r.status == "pass" for r in records)
        skipped = sum(r.status == "skipped" for r in records)
        print(f"{passed} passed, {failed} failed, {skipped} skipped", file=out)
    return EXIT_FAIL if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
