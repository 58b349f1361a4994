"""Pareto dominance, non-dominated filtering and the shared problem model.

Everything here assumes minimization of every objective.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

FEASIBILITY_TOL = 1e-9


class UsageError(ValueError):
    """Raised when an operation is called with arguments outside its contract."""


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise UsageError(f"objective vectors differ in length: {a.shape} vs {b.shape}")
    return a, b


def dominates(a, b) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and strictly better somewhere."""
    a, b = _pair(a, b)
    return bool(np.all(a <= b) and np.any(a < b))


@dataclass(frozen=True, eq=False)
class ConstraintReport:
    """Constraint slacks ``g_i(x)``; a constraint holds when its slack is >= 0."""

    values: np.ndarray
    total_violation: float
    feasible: bool

    @classmethod
    def from_slacks(cls, slacks: Sequence[float]) -> "ConstraintReport":
        values = np.asarray(slacks, dtype=float)
        violation = float(np.sum(np.maximum(0.0, -values)))
        return cls(values=values, total_violation=violation,
                   feasible=violation <= FEASIBILITY_TOL)

    @classmethod
    def unconstrained(cls) -> "ConstraintReport":
        return cls(values=np.zeros(0), total_violation=0.0, feasible=True)


def constrained_dominates(a, b) -> bool:
    """Feasibility-rule comparison of ``(objectives, ConstraintReport)`` pairs.

    A feasible point beats an infeasible one, two infeasible points are ordered
    by total violation alone, and two feasible points fall back to :func:`dominates`.
    """
    fa, ra = a
    fb, rb = b
    fa, fb = _pair(fa, fb)
    if ra.feasible and rb.feasible:
        return dominates(fa, fb)
    if ra.feasible != rb.feasible:
        return ra.feasible
    return ra.total_violation < rb.total_violation


def violation_dominates(fa, va: float, fb, vb: float) -> bool:
    """Scalar-violation form of :func:`constrained_dominates` used in hot loops."""
    a_ok = va <= FEASIBILITY_TOL
    b_ok = vb <= FEASIBILITY_TOL
    if a_ok and b_ok:
        return bool(np.all(fa <= fb) and np.any(fa < fb))
    if a_ok != b_ok:
        return a_ok
    return va < vb


def _nd_mask_2d(points: np.ndarray) -> np.ndarray:
    # lexicographic sort by (f1, f2): a point survives iff its f2 beats every earlier f2
    order = np.lexsort((points[:, 1], points[:, 0]))
    f2 = points[order, 1]
    best_before = np.minimum.accumulate(np.concatenate(([np.inf], f2[:-1])))
    keep = f2 < best_before
    mask = np.zeros(len(points), dtype=bool)
    mask[order[keep]] = True
    return mask


def _nd_mask_general(points: np.ndarray) -> np.ndarray:
    n = len(points)
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        p = points[i]
        le = np.all(points <= p, axis=1)
        lt = np.any(points < p, axis=1)
        if np.any(le & lt):
            mask[i] = False
    return mask


def non_dominated_filter(points) -> np.ndarray:
    """Return the non-dominated rows of ``points`` (exact duplicates kept once).

    Rows keep the order of their first occurrence in the input.
    """
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        return points.reshape(0, points.shape[-1] if points.ndim == 2 else 0)
    if points.ndim != 2:
        raise UsageError("points must be a 2-D array (one row per objective vector)")
    _, first = np.unique(points, axis=0, return_index=True)
    first = np.sort(first)
    unique = points[first]
    if unique.shape[1] == 2:
        mask = _nd_mask_2d(unique)
    else:
        mask = _nd_mask_general(unique)
    return unique[mask]


def non_dominated_indices(points) -> np.ndarray:
    """Indices of the non-dominated rows (first occurrence of duplicates)."""
    points = np.asarray(points, dtype=float)
    if len(points) == 0:
        return np.zeros(0, dtype=int)
    _, first = np.unique(points, axis=0, return_index=True)
    first = np.sort(first)
    unique = points[first]
    mask = _nd_mask_2d(unique) if unique.shape[1] == 2 else _nd_mask_general(unique)
    return first[mask]


@dataclass(eq=False)
class Problem:
    """A box-bounded minimization problem.

    ``evaluate`` maps a decision vector (or a stack of them along the leading
    axis) to objective vectors. ``constraints`` returns a ConstraintReport for a
    single decision vector. ``reference_front`` samples ``count`` points of the
    known or oracle-approximated Pareto front.
    """

    name: str
    lower: np.ndarray
    upper: np.ndarray
    n_obj: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    constraints: Optional[Callable[[np.ndarray], ConstraintReport]] = None
    reference_front: Optional[Callable[[int], np.ndarray]] = None
    variable_names: Optional[tuple[str, ...]] = field(default=None)

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise UsageError(f"{self.name}: bounds must be two equal-length vectors")
        if not np.all(self.lower < self.upper):
            raise UsageError(f"{self.name}: every lower bound must be below its upper bound")
        if self.n_obj < 1:
            raise UsageError(f"{self.name}: n_obj must be positive")

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def bounds(self) -> list[tuple[float, float]]:
        return list(zip(self.lower.tolist(), self.upper.tolist()))

    def check(self, x) -> np.ndarray:
        """Validate shape and box membership of ``x``; returns it as a float array."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.dim,):
            raise UsageError(f"{self.name}: expected dimension {self.dim}, got {x.shape[-1:]}")
        if np.any(x < self.lower) or np.any(x > self.upper):
            raise UsageError(f"{self.name}: decision vector outside the box bounds")
        return x

    def clamp(self, x) -> np.ndarray:
        return np.minimum(np.maximum(x, self.lower), self.upper)
