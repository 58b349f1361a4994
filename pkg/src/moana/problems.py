"""Benchmark and engineering problems with their reference fronts.

ZDT1-4 and ZDT6 have closed-form fronts. MMF1-7 and the welded beam use a
dense decision-space grid, filtered to its non-dominated subset and thinned
by farthest-point selection.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .core import ConstraintReport, Problem, UsageError, non_dominated_indices

PI = np.pi

# ---------------------------------------------------------------------------
# ZDT


def _zdt_g(rest: np.ndarray) -> np.ndarray:
    return 1.0 + 9.0 * rest.sum(axis=-1) / rest.shape[-1]


def _zdt1(x):
    f1 = x[..., 0]
    g = _zdt_g(x[..., 1:])
    return np.stack([f1, g * (1.0 - np.sqrt(f1 / g))], axis=-1)


def _zdt2(x):
    f1 = x[..., 0]
    g = _zdt_g(x[..., 1:])
    return np.stack([f1, g * (1.0 - (f1 / g) ** 2)], axis=-1)


def _zdt3(x):
    f1 = x[..., 0]
    g = _zdt_g(x[..., 1:])
    h = 1.0 - np.sqrt(f1 / g) - (f1 / g) * np.sin(10.0 * PI * f1)
    return np.stack([f1, g * h], axis=-1)


def _zdt4(x):
    f1 = x[..., 0]
    rest = x[..., 1:]
    g = 1.0 + 10.0 * rest.shape[-1] + (rest ** 2 - 10.0 * np.cos(4.0 * PI * rest)).sum(axis=-1)
    return np.stack([f1, g * (1.0 - np.sqrt(f1 / g))], axis=-1)


def _zdt6_f1(x1):
    return 1.0 - np.exp(-4.0 * x1) * np.sin(6.0 * PI * x1) ** 6


def _zdt6(x):
    f1 = _zdt6_f1(x[..., 0])
    rest = x[..., 1:]
    g = 1.0 + 9.0 * (rest.sum(axis=-1) / rest.shape[-1]) ** 0.25
    return np.stack([f1, g * (1.0 - (f1 / g) ** 2)], axis=-1)


_ZDT = {1: _zdt1, 2: _zdt2, 3: _zdt3, 4: _zdt4, 6: _zdt6}
ZDT_DEFAULT_DIM = {1: 30, 2: 30, 3: 30, 4: 10, 6: 30}


def zdt_bounds(zdt_id: int, dim: int) -> tuple[np.ndarray, np.ndarray]:
    lower = np.zeros(dim)
    upper = np.ones(dim)
    if zdt_id == 4:
        lower[1:] = -5.0
        upper[1:] = 5.0
    return lower, upper


def evaluate_zdt(zdt_id: int, x) -> np.ndarray:
    """Checked evaluation of ZDT``zdt_id`` at ``x`` (default dimension enforced)."""
    if zdt_id not in _ZDT:
        raise UsageError(f"unknown ZDT id {zdt_id}")
    return zdt(zdt_id).evaluate(zdt(zdt_id).check(x))


@lru_cache(maxsize=None)
def _zdt6_f1_min() -> float:
    from scipy.optimize import minimize_scalar

    x1 = np.linspace(0.0, 1.0, 200001)
    k = int(np.argmin(_zdt6_f1(x1)))
    res = minimize_scalar(_zdt6_f1, bounds=(x1[max(k - 1, 0)], x1[min(k + 1, len(x1) - 1)]),
                          method="bounded", options={"xatol": 1e-14})
    return float(res.fun)


def _zdt_front(zdt_id: int, count: int) -> np.ndarray:
    if zdt_id in (1, 4):
        f1 = np.linspace(0.0, 1.0, count)
        return np.column_stack([f1, 1.0 - np.sqrt(f1)])
    if zdt_id == 2:
        f1 = np.linspace(0.0, 1.0, count)
        return np.column_stack([f1, 1.0 - f1 ** 2])
    if zdt_id == 6:
        f1 = np.linspace(_zdt6_f1_min(), 1.0, count)
        return np.column_stack([f1, 1.0 - f1 ** 2])
    # ZDT3: disconnected front, oversample the curve then thin the survivors
    f1 = np.linspace(0.0, 1.0, max(200 * count, 100001))
    curve = np.column_stack([f1, 1.0 - np.sqrt(f1) - f1 * np.sin(10.0 * PI * f1)])
    front = curve[non_dominated_indices(curve)]
    return farthest_point_subset(front, count)


def zdt(zdt_id: int, dim: int | None = None) -> Problem:
    if zdt_id not in _ZDT:
        raise UsageError(f"unknown ZDT id {zdt_id}")
    dim = ZDT_DEFAULT_DIM[zdt_id] if dim is None else dim
    if dim < 2:
        raise UsageError("ZDT problems need at least two variables")
    lower, upper = zdt_bounds(zdt_id, dim)
    return Problem(name=f"zdt{zdt_id}", lower=lower, upper=upper, n_obj=2,
                   evaluate=_ZDT[zdt_id],
                   reference_front=lambda count, k=zdt_id: _zdt_front(k, count))


# ---------------------------------------------------------------------------
# MMF (CEC 2019 multimodal multi-objective)


def _mmf1(x):
    a = np.abs(x[..., 0] - 2.0)
    f2 = 1.0 - np.sqrt(a) + 2.0 * (x[..., 1] - np.sin(6.0 * PI * a + PI)) ** 2
    return np.stack([a, f2], axis=-1)


def _mmf_cos_term(y):
    return 2.0 * (4.0 * y ** 2 - 2.0 * np.cos(20.0 * y * PI / np.sqrt(2.0)) + 2.0)


def _mmf2(x):
    x1, x2 = x[..., 0], x[..., 1]
    s = np.sqrt(x1)
    y = np.where(x2 <= 1.0, x2 - s, x2 - 1.0 - s)
    return np.stack([x1, 1.0 - s + _mmf_cos_term(y)], axis=-1)


def _mmf3(x):
    x1, x2 = x[..., 0], x[..., 1]
    s = np.sqrt(x1)
    first = (x2 <= 0.5) | ((x2 < 1.0) & (x1 > 0.25))
    y = np.where(first, x2 - s, x2 - 0.5 - s)
    return np.stack([x1, 1.0 - s + _mmf_cos_term(y)], axis=-1)


def _mmf4(x):
    x1, x2 = x[..., 0], x[..., 1]
    a = np.abs(x1)
    shift = np.where(x2 < 1.0, 0.0, 1.0)
    f2 = 1.0 - x1 ** 2 + 2.0 * (x2 - shift - np.sin(PI * a)) ** 2
    return np.stack([a, f2], axis=-1)


def _mmf5(x):
    a = np.abs(x[..., 0] - 2.0)
    x2 = x[..., 1]
    shift = np.where(x2 <= 1.0, 0.0, 2.0)
    f2 = 1.0 - np.sqrt(a) + 2.0 * (x2 - shift - np.sin(6.0 * PI * a + PI)) ** 2
    return np.stack([a, f2], axis=-1)


def _mmf6(x):
    a = np.abs(x[..., 0] - 2.0)
    x2 = x[..., 1]
    shift = np.where(x2 <= 1.0, 0.0, 1.0)
    f2 = 1.0 - np.sqrt(a) + 2.0 * (x2 - shift - np.sin(6.0 * PI * a + PI)) ** 2
    return np.stack([a, f2], axis=-1)


def _mmf7(x):
    a = np.abs(x[..., 0] - 2.0)
    x2 = x[..., 1]
    wave = (0.3 * a ** 2 * np.cos(24.0 * PI * a + 4.0 * PI) + 0.6 * a) * np.sin(6.0 * PI * a + PI)
    f2 = 1.0 - np.sqrt(a) + (x2 - wave) ** 2
    return np.stack([a, f2], axis=-1)


@dataclass(frozen=True)
class _MMFSpec:
    fn: Callable
    lower: tuple[float, float]
    upper: tuple[float, float]


_MMF = {
    1: _MMFSpec(_mmf1, (1.0, -1.0), (3.0, 1.0)),
    2: _MMFSpec(_mmf2, (0.0, 0.0), (1.0, 2.0)),
    3: _MMFSpec(_mmf3, (0.0, 0.0), (1.0, 1.5)),
    4: _MMFSpec(_mmf4, (-1.0, 0.0), (1.0, 2.0)),
    5: _MMFSpec(_mmf5, (1.0, -1.0), (3.0, 3.0)),
    6: _MMFSpec(_mmf6, (1.0, -1.0), (3.0, 2.0)),
    7: _MMFSpec(_mmf7, (1.0, -1.0), (3.0, 1.0)),
}

MMF_GRID_RESOLUTION = 2001


def mmf(mmf_id: int) -> Problem:
    if mmf_id not in _MMF:
        raise UsageError(f"problem not in registry: mmf{mmf_id}")
    spec = _MMF[mmf_id]
    problem = Problem(name=f"mmf{mmf_id}", lower=np.array(spec.lower), upper=np.array(spec.upper),
                      n_obj=2, evaluate=spec.fn)
    problem.reference_front = lambda count, p=problem: grid_reference_front(
        p, count, MMF_GRID_RESOLUTION)
    return problem


def evaluate_mmf(mmf_id: int, x) -> np.ndarray:
    p = mmf(mmf_id)
    return p.evaluate(p.check(x))


# ---------------------------------------------------------------------------
# Welded beam, decision vector ordered (h, l, t, b)

WELDED_BEAM_LOWER = np.array([0.125, 0.1, 0.1, 0.125])
WELDED_BEAM_UPPER = np.array([5.0, 10.0, 10.0, 5.0])
SHEAR_LIMIT = 13600.0
NORMAL_STRESS_LIMIT = 30000.0
LOAD = 6000.0


@dataclass(frozen=True)
class WeldedBeamDesign:
    h: float
    l: float
    t: float
    b: float

    def __post_init__(self):
        x = self.as_array()
        if np.any(x < WELDED_BEAM_LOWER) or np.any(x > WELDED_BEAM_UPPER):
            raise UsageError(f"welded beam design outside bounds: {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.h, self.l, self.t, self.b], dtype=float)


def _welded_objectives(x):
    h, l, t, b = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    cost = 1.10471 * h ** 2 * l + 0.04811 * t * b * (14.0 + l)
    deflection = 2.1952 / (t ** 3 * b)
    return np.stack([cost, deflection], axis=-1)


def shear_stress(x):
    h, l, t = x[..., 0], x[..., 1], x[..., 2]
    tau_p = LOAD / (np.sqrt(2.0) * h * l)
    radius = np.sqrt(0.25 * (l ** 2 + (h + t) ** 2))
    tau_pp = LOAD * (14.0 + 0.5 * l) * radius / (2.0 * (0.707 * h * l * (l ** 2 / 12.0 + 0.25 * (h + t) ** 2)))
    return np.sqrt(tau_p ** 2 + tau_pp ** 2 + l * tau_p * tau_pp / radius)


def normal_stress(x):
    return 504000.0 / (x[..., 2] ** 2 * x[..., 3])


def buckling_load(x):
    t, b = x[..., 2], x[..., 3]
    return 64746.022 * (1.0 - 0.0282346 * t) * t * b ** 3


def welded_beam_slacks(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.stack([
        SHEAR_LIMIT - shear_stress(x),
        NORMAL_STRESS_LIMIT - normal_stress(x),
        x[..., 3] - x[..., 0],
        buckling_load(x) - LOAD,
    ], axis=-1)


def _welded_constraints(x) -> ConstraintReport:
    return ConstraintReport.from_slacks(welded_beam_slacks(x))


def evaluate_welded_beam(design: WeldedBeamDesign) -> tuple[np.ndarray, ConstraintReport]:
    x = design.as_array()
    return _welded_objectives(x), _welded_constraints(x)


WELDED_GRID_RESOLUTION = 41


def _welded_front(count: int, resolution: int = WELDED_GRID_RESOLUTION) -> np.ndarray:
    axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(WELDED_BEAM_LOWER, WELDED_BEAM_UPPER)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 4)
    slacks = welded_beam_slacks(mesh)
    feasible = np.all(slacks >= 0.0, axis=1)
    F = _welded_objectives(mesh[feasible])
    return farthest_point_subset(F[non_dominated_indices(F)], count)


def welded_beam() -> Problem:
    return Problem(name="welded_beam", lower=WELDED_BEAM_LOWER.copy(), upper=WELDED_BEAM_UPPER.copy(),
                   n_obj=2, evaluate=_welded_objectives, constraints=_welded_constraints,
                   reference_front=_welded_front, variable_names=("h", "l", "t", "b"))


# ---------------------------------------------------------------------------
# reference fronts


def farthest_point_subset(points: np.ndarray, count: int) -> np.ndarray:
    """Greedy farthest-point thinning, seeded at the lexicographically smallest point."""
    points = np.asarray(points, dtype=float)
    if len(points) <= count:
        return points[np.lexsort(points.T[::-1])]
    start = int(np.lexsort(points.T[::-1])[0])
    chosen = [start]
    dist = np.linalg.norm(points - points[start], axis=1)
    for _ in range(count - 1):
        nxt = int(np.argmax(dist))
        chosen.append(nxt)
        dist = np.minimum(dist, np.linalg.norm(points - points[nxt], axis=1))
    sub = points[chosen]
    return sub[np.lexsort(sub.T[::-1])]


def grid_reference_front(problem: Problem, count: int, resolution: int) -> np.ndarray:
    """Non-dominated image of a uniform decision grid, thinned to ``count`` points."""
    axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(problem.lower, problem.upper)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, problem.dim)
    F = problem.evaluate(mesh)
    return farthest_point_subset(F[non_dominated_indices(F)], count)


@dataclass(frozen=True, eq=False)
class ReferenceFront:
    points: np.ndarray
    provenance: str  # "analytic" or "sampled-oracle"


@lru_cache(maxsize=32)
def _cached_front(name: str, count: int) -> np.ndarray:
    front = get_problem(name).reference_front(count)
    front.setflags(write=False)
    return front


def sample_reference_front(problem: Problem | str, count: int) -> ReferenceFront:
    if count < 2:
        raise UsageError("reference front needs at least 2 points")
    name = problem if isinstance(problem, str) else problem.name
    if name not in REGISTRY:
        raise UsageError(f"problem not in registry: {name}")
    provenance = "analytic" if name.startswith("zdt") else "sampled-oracle"
    return ReferenceFront(points=_cached_front(name, count), provenance=provenance)


# ---------------------------------------------------------------------------
# registry

REGISTRY: dict[str, Callable[[], Problem]] = {
    **{f"zdt{k}": (lambda k=k: zdt(k)) for k in _ZDT},
    **{f"mmf{k}": (lambda k=k: mmf(k)) for k in _MMF},
    "welded_beam": welded_beam,
}


def get_problem(name: str, dim: int | None = None) -> Problem:
    key = name.strip().lower()
    if key not in REGISTRY:
        raise UsageError(f"problem not in registry: {name}")
    if dim is not None:
        if not key.startswith("zdt"):
            raise UsageError(f"{name} has a fixed dimension")
        return zdt(int(key[3:]), dim)
    return REGISTRY[key]()
