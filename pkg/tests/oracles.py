"""Slow, obviously-correct reference implementations used only by the tests."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def bf_dominates(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def bf_nondominated(points) -> list[tuple]:
    """Distinct points not dominated by any other offered point."""
    pts = [tuple(map(float, p)) for p in points]
    out = []
    for p in pts:
        if p in out:
            continue
        if not any(bf_dominates(q, p) for q in pts):
            out.append(p)
    return out


def has_dominated_pair(points) -> bool:
    pts = [tuple(map(float, p)) for p in points]
    return any(bf_dominates(p, q) for p in pts for q in pts)


def midranks(values) -> list[Fraction]:
    order = sorted(values)
    ranks = []
    for v in values:
        first = order.index(v) + 1
        count = order.count(v)
        ranks.append(Fraction(2 * first + count - 1, 2))
    return ranks


def enumerated_rank_sum_p(a, b) -> float:
    """Two-sided exact p by listing every way to assign pooled ranks to sample a."""
    pooled = list(a) + list(b)
    ranks = midranks(pooled)
    n1 = len(a)
    centre = Fraction(n1 * (len(pooled) + 1), 2)
    observed = abs(sum(ranks[:n1]) - centre)
    hits = total = 0
    for combo in itertools.combinations(range(len(pooled)), n1):
        total += 1
        if abs(sum(ranks[i] for i in combo) - centre) >= observed:
            hits += 1
    return hits / total


def hand_friedman(sums, n) -> Fraction:
    k = len(sums)
    return Fraction(12, n * k * (k + 1)) * sum(Fraction(r) ** 2 for r in sums) - 3 * n * (k + 1)


def hand_igd(front, reference) -> float:
    total = 0.0
    for r in reference:
        total += min(sum((x - y) ** 2 for x, y in zip(r, f)) for f in front)
    return math.sqrt(total) / len(reference)


def nondominated_rows(F: np.ndarray) -> np.ndarray:
    keep = [i for i, p in enumerate(F) if not any(bf_dominates(q, p) for q in F)]
    return F[keep]
