"""Command-line entry point: ``moana run|fronts|compare``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moana", description="Seeded MOANA experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--out-dir", type=Path)
    p_run.add_argument("--runs", type=int)
    p_run.add_argument("--iterations", type=int)
    p_run.add_argument("--population", type=int)
    p_run.add_argument("--capacity", type=int)
    p_run.add_argument("--quiet", action="store_true")

    p_fr = sub.add_parser("fronts", help="write a reference front as CSV")
    p_fr.add_argument("problem")
    p_fr.add_argument("--count", type=int, default=1000)
    p_fr.add_argument("--out-dir", type=Path, help="write <problem>_front.csv here instead of stdout")

    p_cmp = sub.add_parser("compare", help="rank/Friedman/rank-sum report for a stats.csv")
    p_cmp.add_argument("stats", type=Path)
    p_cmp.add_argument("--out-dir", type=Path)
    return parser


def _cmd_run(args) -> int:
    text = args.config.read_text(encoding="utf-8")
    cfg = harness.parse_config(text, seed=args.seed, runs=args.runs, iterations=args.iterations,
                               population=args.population, capacity=args.capacity,
                               out_dir=str(args.out_dir) if args.out_dir else None)
    log = None if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    harness.run_experiment(cfg, log=log)
    print(f"wrote results to {cfg.out_dir}")
    return 0


def _cmd_fronts(args) -> int:
    if args.out_dir is None:
        sys.stdout.write(harness.write_reference_front(args.problem.lower(), args.count))
        return 0
    args.out_dir.mkdir(parents=True, exist_ok=True)
    path = args.out_dir / f"{args.problem.lower()}_front.csv"
    harness.write_reference_front(args.problem.lower(), args.count, path)
    print(f"wrote {path}")
    return 0


def _cmd_compare(args) -> int:
    report = harness.compare_files(args.stats, args.out_dir)
    for notice in report["notices"]:
        print(f"notice: {notice}", file=sys.stderr)
    if "column_sums" in report:
        print("rank sums: " + ", ".join(f"{a}={s}" for a, s in
                                        zip(report["algorithms"], report["column_sums"])))
    fr = report.get("friedman")
    if fr:
        verdict = "significant" if fr["significant_at_0_05"] else "not significant"
        print(f"friedman chi2={fr['chi_square']:.4f} (critical {fr['critical_value']}, {verdict})")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "fronts": _cmd_fronts, "compare": _cmd_compare}[args.command]
    try:
        return handler(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"moana: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
