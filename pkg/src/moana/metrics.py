"""Quality indicator and nonparametric statistics for comparing optimizers."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import special, stats

from .core import UsageError


@dataclass(frozen=True)
class IgdSample:
    value: float
    front_size: int
    reference_size: int


def _points(a, what: str) -> np.ndarray:
    if hasattr(a, "points"):
        a = a.points
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    if a.size == 0:
        raise UsageError(f"IGD needs a non-empty {what}")
    return a


def nearest_distances(reference, front, chunk: int = 4096) -> np.ndarray:
    """Euclidean distance from each reference point to its nearest front point."""
    out = np.empty(len(reference))
    for s in range(0, len(reference), chunk):
        diff = reference[s:s + chunk, None, :] - front[None, :, :]
        out[s:s + chunk] = np.sqrt(np.min(np.einsum("ijk,ijk->ij", diff, diff), axis=1))
    return out


def igd(front, reference, conventional: bool = False) -> IgdSample:
    """Inverted generational distance of ``front`` against ``reference``.

    The default is sqrt(sum d_i^2) / n over the n reference points; with
    ``conventional=True`` it is the plain mean of the d_i.
    """
    front = _points(front, "front")
    reference = _points(reference, "reference")
    if front.shape[1] != reference.shape[1]:
        raise UsageError("front and reference differ in objective count")
    d = nearest_distances(reference, front)
    n = len(reference)
    value = float(d.mean()) if conventional else float(np.sqrt(np.sum(d * d)) / n)
    return IgdSample(value=value, front_size=len(front), reference_size=n)


# ---------------------------------------------------------------------------
# Wilcoxon rank-sum

EXACT_LIMIT = 20


def _exact_two_sided(doubled_ranks: list[int], n1: int, observed: int) -> float:
    # counts[k][s]: number of size-k subsets whose doubled rank sum is s
    total = sum(doubled_ranks)
    counts = [[0] * (total + 1) for _ in range(n1 + 1)]
    counts[0][0] = 1
    for r in doubled_ranks:
        for k in range(n1, 0, -1):
            row, prev = counts[k], counts[k - 1]
            for s in range(total, r - 1, -1):
                if prev[s - r]:
                    row[s] += prev[s - r]
    N = len(doubled_ranks)
    centre = n1 * (N + 1)  # doubled expectation
    dev = abs(observed - centre)
    hits = sum(c for s, c in enumerate(counts[n1]) if c and abs(s - centre) >= dev)
    return min(1.0, hits / math.comb(N, n1))


def wilcoxon_rank_sum(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sided rank-sum p-value.

    Exact enumeration (midranks included) when the pooled size is at most 20,
    otherwise the tie-corrected normal approximation with continuity correction.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise UsageError("each sample needs at least two observations")
    pooled = np.concatenate([a, b])
    if np.all(pooled == pooled[0]):
        return 1.0
    ranks = stats.rankdata(pooled)
    n1, n2 = len(a), len(b)
    N = n1 + n2
    if N <= EXACT_LIMIT:
        doubled = [int(round(2 * r)) for r in ranks]
        return _exact_two_sided(doubled, n1, sum(doubled[:n1]))
    w = float(ranks[:n1].sum())
    mean = n1 * (N + 1) / 2.0
    _, tie_sizes = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(tie_sizes ** 3 - tie_sizes)) / (N * (N - 1))
    var = n1 * n2 / 12.0 * ((N + 1) - tie_term)
    if var <= 0:
        return 1.0
    z = max(abs(w - mean) - 0.5, 0.0) / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


# ---------------------------------------------------------------------------
# rank tables and the Friedman test


@dataclass(frozen=True, eq=False)
class RankTable:
    functions: list[str]
    algorithms: list[str]
    ranks: np.ndarray
    column_sums: np.ndarray

    @classmethod
    def from_ranks(cls, functions, algorithms, ranks) -> "RankTable":
        ranks = np.asarray(ranks, dtype=int)
        if ranks.shape != (len(functions), len(algorithms)):
            raise UsageError(f"rank matrix shape {ranks.shape} does not match "
                             f"{len(functions)} functions x {len(algorithms)} algorithms")
        return cls(list(functions), list(algorithms), ranks, ranks.sum(axis=0))

    @property
    def irregular_rows(self) -> list[str]:
        """Functions whose ranks are not a permutation of 1..k."""
        k = len(self.algorithms)
        target = list(range(1, k + 1))
        return [f for f, row in zip(self.functions, self.ranks) if sorted(row.tolist()) != target]


def rank_table(mean_scores, functions=None, algorithms=None, lower_is_better: bool = True) -> RankTable:
    """Rank algorithms per function; ties share the smaller rank and the next rank is skipped."""
    scores = np.asarray(mean_scores, dtype=float)
    if scores.ndim != 2:
        raise UsageError("mean_scores must be a functions x algorithms matrix")
    if np.isnan(scores).any():
        raise UsageError("mean_scores contains NaN")
    functions = functions or [f"f{i + 1}" for i in range(scores.shape[0])]
    algorithms = algorithms or [f"a{j + 1}" for j in range(scores.shape[1])]
    keyed = scores if lower_is_better else -scores
    ranks = np.vstack([stats.rankdata(row, method="min") for row in keyed]).astype(int)
    return RankTable.from_ranks(functions, algorithms, ranks)


@dataclass(frozen=True)
class FriedmanResult:
    chi_square: float
    significant_at_0_05: bool
    p_value: float
    critical_value: float
    df: int


def chi2_critical(df: int, alpha: float = 0.05) -> float:
    """Upper critical value rounded to three decimals, as printed in chi-square tables."""
    return round(float(stats.chi2.ppf(1.0 - alpha, df)), 3)


def friedman_statistic(column_sums, n: int) -> float:
    # exact rational arithmetic, one rounding at the end
    R = [Fraction(float(r)) for r in column_sums]
    k = len(R)
    chi = Fraction(12, n * k * (k + 1)) * sum(r * r for r in R) - 3 * n * (k + 1)
    return float(chi)


def friedman_from_sums(column_sums, n: int) -> FriedmanResult:
    k = len(column_sums)
    if n < 2 or k < 3:
        raise UsageError("Friedman test needs n >= 2 functions and k >= 3 algorithms")
    chi = friedman_statistic(column_sums, n)
    df = k - 1
    crit = chi2_critical(df)
    p = float(special.gammaincc(df / 2.0, max(chi, 0.0) / 2.0))
    return FriedmanResult(chi_square=chi, significant_at_0_05=chi > crit, p_value=p,
                          critical_value=crit, df=df)


def friedman(table: RankTable) -> FriedmanResult:
    """Friedman chi-square from a rank table's column sums; significant when above the critical value."""
    if table.ranks.shape != (len(table.functions), len(table.algorithms)):
        raise UsageError("rank table shape is inconsistent")
    return friedman_from_sums(table.column_sums, len(table.functions))
