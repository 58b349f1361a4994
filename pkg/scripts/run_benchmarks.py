"""Run a benchmark config and print a stats table.

    python3 scripts/run_benchmarks.py configs/benchmarks.yaml --runs 3
"""
import argparse
import sys
from pathlib import Path

from moana.harness import aggregate, load_published, parse_config, run_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config", type=Path)
    ap.add_argument("--runs", type=int)
    ap.add_argument("--out-dir")
    args = ap.parse_args()
    cfg = parse_config(args.config.read_text(), runs=args.runs, out_dir=args.out_dir)
    rows = run_experiment(cfg, log=lambda m: print(m, file=sys.stderr))
    published = load_published()
    print(f"{'problem':<12}{'mean':>12}{'std':>12}{'best':>12}{'worst':>12}{'published':>12}")
    for s in aggregate(rows):
        ref = published.get(s.problem, {}).get("MOANA", {}).get("igd_mean", float("nan"))
        print(f"{s.problem:<12}{s.igd_mean:12.6f}{s.igd_std:12.6f}{s.igd_best:12.6f}"
              f"{s.igd_worst:12.6f}{ref:12.6f}")
    print(f"artifacts in {cfg.out_dir}")


if __name__ == "__main__":
    main()
