"""Single welded-beam run: writes the final front and the archive-size trace.

    python3 scripts/welded_beam.py --seed 2024 --out results/welded_beam_front.csv
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from moana import RunConfig, get_problem, run
from moana.problems import welded_beam_slacks


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--population", type=int, default=100)
    ap.add_argument("--iterations", type=int, default=100)
    ap.add_argument("--capacity", type=int, default=100)
    ap.add_argument("--out", type=Path, default=Path("results/welded_beam_front.csv"))
    args = ap.parse_args()

    res = run(get_problem("welded_beam"),
              RunConfig(population_size=args.population, iterations=args.iterations,
                        archive_capacity=args.capacity, seed=args.seed))
    X, F = res.final_decisions, res.final_objectives
    order = np.argsort(F[:, 0])
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cost", "deflection", "h", "l", "t", "b"])
        for i in order:
            w.writerow([repr(float(v)) for v in (*F[i], *X[i])])
    trace = res.archive_size_trace
    full = next((t + 1 for t, n in enumerate(trace) if n >= args.capacity), None)
    print(f"front size {len(F)}; archive {trace[0]} after iteration 1, full at iteration {full}")
    print(f"cost {F[:, 0].min():.4f}..{F[:, 0].max():.4f}, "
          f"deflection {F[:, 1].min():.3e}..{F[:, 1].max():.3e}")
    print(f"min constraint slack {welded_beam_slacks(X).min():.4g}; wrote {args.out}")


if __name__ == "__main__":
    main()
