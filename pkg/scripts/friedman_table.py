"""Friedman test over the bundled published rank tables.

Reports both the column sums recomputed from the per-function ranks and the
printed totals, which disagree in the MOPSO column.
"""
from moana.harness import load_published_ranks
from moana.metrics import RankTable, friedman, friedman_from_sums

PRINTED_TOTALS = {"MOANA": 27, "MOFDO": 41, "MOPSO": 61, "NSGA-III": 77, "MODA": 47}


def main():
    functions, algorithms, ranks = load_published_ranks()
    table = RankTable.from_ranks(functions, algorithms, ranks)
    print("problem   " + "".join(f"{a:>10}" for a in algorithms))
    for f, row in zip(functions, ranks):
        print(f"{f:<10}" + "".join(f"{r:>10}" for r in row))
    print(f"{'sum':<10}" + "".join(f"{s:>10}" for s in table.column_sums))
    if table.irregular_rows:
        print("rows with tied/duplicate ranks: " + ", ".join(table.irregular_rows))
    for label, res in (("recomputed sums", friedman(table)),
                       ("printed totals", friedman_from_sums(
                           [PRINTED_TOTALS[a] for a in algorithms], len(functions)))):
        verdict = "significant" if res.significant_at_0_05 else "not significant"
        print(f"{label}: chi2 = {res.chi_square:.4f}, critical {res.critical_value} "
              f"(df {res.df}), p = {res.p_value:.3g} -> {verdict}")


if __name__ == "__main__":
    main()
