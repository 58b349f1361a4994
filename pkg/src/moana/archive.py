"""Bounded non-dominated archive with a hypercube grid over objective space.

The grid drives two density decisions: guides are drawn from the least
populated cells and, once the archive overflows, members are evicted at
random from the most populated cell.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import FEASIBILITY_TOL, UsageError


@dataclass
class GridSpec:
    lower: np.ndarray
    upper: np.ndarray
    divisions: int
    inflation: float


@dataclass(frozen=True, eq=False)
class ArchiveMember:
    decision: np.ndarray
    objectives: np.ndarray
    cell: tuple[int, ...]
    violation: float = 0.0


def cell_index(objectives, grid: GridSpec) -> tuple[int, ...]:
    """Per-objective cell coordinate, clamped to the edge cells."""
    f = np.asarray(objectives, dtype=float)
    idx = _cells(f[None, :], grid.lower, grid.upper, grid.divisions)[0]
    return tuple(int(i) for i in idx)


def _cells(F: np.ndarray, lower: np.ndarray, upper: np.ndarray, divisions: int) -> np.ndarray:
    scaled = (F - lower) / (upper - lower) * divisions
    return np.clip(np.floor(scaled), 0, divisions - 1).astype(np.int64)


def grid_for(F: np.ndarray, divisions: int, inflation: float) -> GridSpec:
    """Inflated bounding box of the rows of ``F``; zero-width ranges are widened to +-0.5."""
    lo = F.min(axis=0)
    hi = F.max(axis=0)
    span = hi - lo
    lower = lo - inflation * span
    upper = hi + inflation * span
    flat = span <= 0
    lower[flat] = lo[flat] - 0.5
    upper[flat] = hi[flat] + 0.5
    return GridSpec(lower=lower, upper=upper, divisions=divisions, inflation=inflation)


def _beats(F: np.ndarray, V: np.ndarray, f: np.ndarray, v: float) -> np.ndarray:
    """Rows of (F, V) that constrained-dominate the candidate (f, v)."""
    rows_ok = V <= FEASIBILITY_TOL
    if v <= FEASIBILITY_TOL:
        return rows_ok & np.all(F <= f, axis=1) & np.any(F < f, axis=1)
    return rows_ok | (V < v)


def _beaten_by(F: np.ndarray, V: np.ndarray, f: np.ndarray, v: float) -> np.ndarray:
    """Rows of (F, V) that the candidate (f, v) constrained-dominates."""
    rows_ok = V <= FEASIBILITY_TOL
    if v <= FEASIBILITY_TOL:
        return ~rows_ok | (np.all(f <= F, axis=1) & np.any(f < F, axis=1))
    return ~rows_ok & (v < V)


class Archive:
    """Capacity-bounded set of mutually non-dominated solutions.

    Members carry a scalar constraint violation; comparisons follow the
    feasibility rules, which reduce to plain Pareto dominance when every
    violation is zero.

    Besides the members, the archive keeps the non-dominated front of every
    point it was ever offered (evicted ones included) as an admission gate.
    A candidate beaten by, or equal to, anything on that front is refused, so
    the members always remain non-dominated among all offered points. The
    gate coincides with the member set until the first eviction.
    """

    def __init__(self, capacity: int, grid_divisions: int = 7, inflation: float = 0.1,
                 remove_count: int = 2, guide_cell_count: int = 2,
                 rng: Optional[np.random.Generator] = None):
        if capacity < 1:
            raise UsageError("archive capacity must be >= 1")
        if grid_divisions < 1:
            raise UsageError("grid_divisions must be >= 1")
        if remove_count < 1 or guide_cell_count < 1:
            raise UsageError("remove_count and guide_cell_count must be >= 1")
        if inflation < 0:
            raise UsageError("inflation must be nonnegative")
        self.capacity = capacity
        self.divisions = grid_divisions
        self.inflation = inflation
        self.remove_count = remove_count
        self.guide_cell_count = guide_cell_count
        self.rng = rng if rng is not None else np.random.default_rng()
        self._X: Optional[np.ndarray] = None
        self._F: Optional[np.ndarray] = None
        self._V = np.zeros(capacity + 1)
        self._C: Optional[np.ndarray] = None
        self.size = 0
        self.grid: Optional[GridSpec] = None
        self._extent: Optional[tuple[np.ndarray, np.ndarray]] = None
        self._density = None
        self._HF: Optional[np.ndarray] = None
        self._HV = np.zeros(0)

    def __len__(self) -> int:
        return self.size

    # -- views ---------------------------------------------------------------
    @property
    def decisions(self) -> np.ndarray:
        if self._X is None:
            return np.zeros((0, 0))
        return self._X[:self.size].copy()

    @property
    def objectives(self) -> np.ndarray:
        if self._F is None:
            return np.zeros((0, 0))
        return self._F[:self.size].copy()

    @property
    def violations(self) -> np.ndarray:
        return self._V[:self.size].copy()

    @property
    def cells(self) -> np.ndarray:
        return self._C[:self.size].copy()

    @property
    def members(self) -> list[ArchiveMember]:
        return [self._member(i) for i in range(self.size)]

    def _member(self, i: int) -> ArchiveMember:
        return ArchiveMember(decision=self._X[i].copy(), objectives=self._F[i].copy(),
                             cell=tuple(int(c) for c in self._C[i]), violation=float(self._V[i]))

    # -- grid ----------------------------------------------------------------
    def rebuild_grid(self) -> GridSpec:
        """Recompute the inflated grid from the current members and re-index them."""
        if self.size == 0:
            raise UsageError("cannot build a grid over an empty archive")
        F = self._F[:self.size]
        self.grid = grid_for(F, self.divisions, self.inflation)
        self._extent = (F.min(axis=0), F.max(axis=0))
        self._C[:self.size] = _cells(F, self.grid.lower, self.grid.upper, self.divisions)
        self._density = None
        return self.grid

    def _refresh_grid(self, new_rows: np.ndarray) -> None:
        F = self._F[:self.size]
        lo, hi = F.min(axis=0), F.max(axis=0)
        if (self._extent is None or not np.array_equal(lo, self._extent[0])
                or not np.array_equal(hi, self._extent[1])):
            self.rebuild_grid()
        else:
            self._C[new_rows] = _cells(self._F[new_rows], self.grid.lower, self.grid.upper,
                                       self.divisions)
            self._density = None

    def _keys(self) -> np.ndarray:
        C = self._C[:self.size]
        weights = self.divisions ** np.arange(C.shape[1], dtype=np.int64)
        return C @ weights

    def _occupancy(self):
        if self._density is None:
            keys = self._keys()
            uniq, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
            self._density = (uniq, inverse.reshape(-1), counts)
        return self._density

    # -- mutation ------------------------------------------------------------
    def _allocate(self, dim: int, n_obj: int) -> None:
        self._X = np.empty((self.capacity + 1, dim))
        self._F = np.empty((self.capacity + 1, n_obj))
        self._C = np.zeros((self.capacity + 1, n_obj), dtype=np.int64)

    def try_insert(self, decision, objectives, violation: float = 0.0) -> bool:
        """Offer a solution; returns True when it is a member afterwards."""
        x = np.asarray(decision, dtype=float)
        f = np.asarray(objectives, dtype=float)
        if not np.all(np.isfinite(f)):
            raise UsageError("archive candidates must have finite objectives")
        if self._X is None:
            self._allocate(len(x), len(f))
        elif f.shape != (self._F.shape[1],) or x.shape != (self._X.shape[1],):
            raise UsageError("candidate shape does not match archive members")
        if not self._admit(f, violation):
            return False
        n = self.size
        if n:
            loses = _beaten_by(self._F[:n], self._V[:n], f, violation)
            if loses.any():
                keep = ~loses
                m = int(keep.sum())
                self._X[:m] = self._X[:n][keep]
                self._F[:m] = self._F[:n][keep]
                self._V[:m] = self._V[:n][keep]
                self._C[:m] = self._C[:n][keep]
                n = m
        self._X[n] = x
        self._F[n] = f
        self._V[n] = violation
        self.size = n + 1
        self._refresh_grid(np.array([n]))
        if self.size > self.capacity:
            self._evict()
        return self._contains(f, violation)

    def _admit(self, f: np.ndarray, violation: float) -> bool:
        """Check ``f`` against the history front and fold it in when admissible."""
        if self._HF is None:
            self._HF = f[None, :].copy()
            self._HV = np.array([violation])
            return True
        HF, HV = self._HF, self._HV
        if _beats(HF, HV, f, violation).any():
            return False
        if np.any(np.all(HF == f, axis=1) & (HV == violation)):
            return False
        keep = ~_beaten_by(HF, HV, f, violation)
        self._HF = np.vstack([HF[keep], f[None, :]])
        self._HV = np.append(HV[keep], violation)
        return True

    def _contains(self, f: np.ndarray, violation: float) -> bool:
        F = self._F[:self.size]
        return bool(np.any(np.all(F == f, axis=1) & (self._V[:self.size] == violation)))

    def _evict(self) -> None:
        while self.size > self.capacity:
            uniq, inverse, counts = self._occupancy()
            crowded = np.flatnonzero(counts == counts.max())
            cell = crowded[self.rng.integers(len(crowded))] if len(crowded) > 1 else crowded[0]
            residents = np.flatnonzero(inverse == cell)
            k = min(self.remove_count, self.size - self.capacity, len(residents))
            gone = self.rng.choice(residents, size=k, replace=False)
            keep = np.ones(self.size, dtype=bool)
            keep[gone] = False
            m = int(keep.sum())
            self._X[:m] = self._X[:self.size][keep]
            self._F[:m] = self._F[:self.size][keep]
            self._V[:m] = self._V[:self.size][keep]
            self._C[:m] = self._C[:self.size][keep]
            self.size = m
            self._density = None
        F = self._F[:self.size]
        if not (np.array_equal(F.min(axis=0), self._extent[0])
                and np.array_equal(F.max(axis=0), self._extent[1])):
            self.rebuild_grid()

    # -- guidance ------------------------------------------------------------
    def select_guide_index(self, rng: Optional[np.random.Generator] = None) -> int:
        if self.size == 0:
            raise UsageError("guide selection on an empty archive; seed it with the initial population first")
        rng = rng if rng is not None else self.rng
        if self.size == 1:
            return 0
        uniq, inverse, counts = self._occupancy()
        perm = rng.permutation(len(uniq))
        order = perm[np.argsort(counts[perm], kind="stable")]
        chosen = order[:self.guide_cell_count]
        pool = np.flatnonzero(np.isin(inverse, chosen))
        return int(pool[rng.integers(len(pool))])

    def select_guide(self, rng: Optional[np.random.Generator] = None) -> ArchiveMember:
        """Pick a member uniformly from the ``guide_cell_count`` least populated cells."""
        return self._member(self.select_guide_index(rng))

    def guide_arrays(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        return self._X[i], self._F[i]
