"""Multi-objective ant nesting optimizer.

Worker ants move toward archive guides with a step scaled by a deposition
weight and keep a move only when it dominates their current point. Each
iteration a polynomially mutated copy of every ant is offered to the archive
alongside the ant itself; the ant adopts the copy only if it dominates.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .archive import Archive
from .core import ConstraintReport, Problem, UsageError, violation_dominates

SAME_POSITION_TOL = 1e-12
RATIO_FLOOR = 1e-12


class EvaluationError(RuntimeError):
    pass


@dataclass(frozen=True)
class MutationParams:
    index: float = 2.0
    probability: float = 0.5

    def __post_init__(self):
        if not self.index > 0:
            raise UsageError("mutation distribution index must be positive")
        if not 0.0 <= self.probability <= 1.0:
            raise UsageError("mutation probability must lie in [0, 1]")


@dataclass(frozen=True)
class RunConfig:
    population_size: int = 500
    iterations: int = 100
    archive_capacity: int = 500
    grid_divisions: int = 7
    inflation: float = 0.1
    mutation: MutationParams = field(default_factory=MutationParams)
    remove_count: int = 2
    guide_cell_count: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 1:
            raise UsageError("population_size must be >= 1")
        if self.iterations < 0:
            raise UsageError("iterations must be >= 0")
        if self.archive_capacity < 1:
            raise UsageError("archive_capacity must be >= 1")
        if self.grid_divisions < 1:
            raise UsageError("grid_divisions must be >= 1")
        if self.inflation < 0:
            raise UsageError("inflation must be nonnegative")
        if self.remove_count < 1 or self.guide_cell_count < 1:
            raise UsageError("remove_count and guide_cell_count must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class WorkerAnt:
    position: np.ndarray
    previous_position: np.ndarray
    fitness: np.ndarray
    previous_fitness: np.ndarray
    stored_dw: float
    violation: float = 0.0
    previous_violation: float = 0.0
    # set by a rejected move; the next branch-(c) step reuses stored_dw
    reuse_dw: bool = False


@dataclass
class RunResult:
    final_decisions: np.ndarray
    final_objectives: np.ndarray
    archive_size_trace: list[int]
    igd_trace: Optional[list[float]]
    config_echo: dict
    seed: int
    evaluations: int

    @property
    def final_front(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return list(zip(self.final_decisions, self.final_objectives))


def tendency_sum(pos_a, pos_b, fit_a, fit_b) -> float:
    """Sum over objectives of the Pythagorean leg sqrt(D^2 - df_o^2).

    D is the decision-space distance between the two positions; negative
    radicands are clamped to zero.
    """
    d = np.asarray(pos_a, dtype=float) - np.asarray(pos_b, dtype=float)
    dist2 = float(d @ d)
    df = np.asarray(fit_a, dtype=float) - np.asarray(fit_b, dtype=float)
    return float(np.sqrt(np.maximum(0.0, dist2 - df * df)).sum())


def deposition_weight(tendency: float, tendency_previous: float, r: float) -> float:
    if tendency_previous < RATIO_FLOOR:
        return r
    return r * (tendency / tendency_previous)


def delta_position(ant: WorkerAnt, guide, r: float, dw: float) -> np.ndarray:
    """Change of deposition position for one ant; picks the branch itself."""
    x = ant.position
    guide = np.asarray(guide, dtype=float)
    if np.all(np.abs(x - guide) < SAME_POSITION_TOL):
        return r * x
    if np.all(np.abs(x - ant.previous_position) < SAME_POSITION_TOL):
        return r * (guide - x)
    return dw * (guide - x)


def mutation_alpha(v, q: float):
    """Polynomial-mutation step factor for uniform draws ``v`` in [0, 1)."""
    v = np.asarray(v, dtype=float)
    e = 1.0 / (q + 1.0)
    low = np.power(2.0 * v, e) - 1.0
    high = 1.0 - np.power(np.maximum(2.0 * (1.0 - v), 0.0), e)
    return np.where(v < 0.5, low, high)


def polynomial_mutation(s, lower, upper, params: MutationParams,
                        rng: np.random.Generator) -> np.ndarray:
    """Mutate each variable with probability ``params.probability``.

    The perturbation is alpha * max(s - l, u - s) followed by clamping to the box.
    """
    s = np.asarray(s, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(s < lower) or np.any(s > upper):
        raise UsageError("polynomial_mutation input lies outside its bounds")
    selected = rng.random(s.shape) < params.probability
    v = rng.random(s.shape)
    if not selected.any():
        return s.copy()
    beta_max = np.maximum(s - lower, upper - s)
    moved = s + mutation_alpha(v, params.index) * beta_max
    out = np.where(selected, moved, s)
    return np.minimum(np.maximum(out, lower), upper)


class _Evaluator:
    """Wraps a problem, counts evaluations and converts constraints to a violation."""

    def __init__(self, problem: Problem):
        self.problem = problem
        self.count = 0

    def __call__(self, x: np.ndarray) -> tuple[np.ndarray, float]:
        self.count += 1
        f = np.asarray(self.problem.evaluate(x), dtype=float)
        violation = 0.0
        if self.problem.constraints is not None:
            report: ConstraintReport = self.problem.constraints(x)
            violation = report.total_violation
        return f, violation


def _check_finite(f: np.ndarray, ant: int, iteration: int, problem: str) -> None:
    if not np.all(np.isfinite(f)):
        raise EvaluationError(
            f"{problem}: non-finite objective {f.tolist()} for ant {ant} at iteration {iteration}")


def _move(ant: WorkerAnt, x: np.ndarray, f: np.ndarray, v: float) -> None:
    ant.previous_position = ant.position
    ant.previous_fitness = ant.fitness
    ant.previous_violation = ant.violation
    ant.position = x
    ant.fitness = f
    ant.violation = v


def step(population: list[WorkerAnt], archive: Archive, problem: Problem, config: RunConfig,
         rng: np.random.Generator, iteration: int = 0, evaluator: Optional[_Evaluator] = None) -> None:
    """One full pass over the population, updating ants and archive in place."""
    if len(population) != config.population_size:
        raise UsageError("population size does not match the run configuration")
    if len(archive) == 0:
        raise UsageError("archive must be seeded before stepping")
    ev = evaluator if evaluator is not None else _Evaluator(problem)
    lower, upper = problem.lower, problem.upper
    for i, ant in enumerate(population):
        g = archive.select_guide_index(rng)
        gx, gf = archive.guide_arrays(g)
        gx, gf = gx.copy(), gf.copy()
        r = float(rng.uniform(-1.0, 1.0))
        x = ant.position
        reused = False
        if np.all(np.abs(x - gx) < SAME_POSITION_TOL):
            dx = r * x
            dw = r
        elif np.all(np.abs(x - ant.previous_position) < SAME_POSITION_TOL):
            dx = r * (gx - x)
            dw = r
        else:
            if ant.reuse_dw:
                dw = ant.stored_dw
                ant.reuse_dw = False
                reused = True
            else:
                t_now = tendency_sum(gx, x, gf, ant.fitness)
                t_prev = tendency_sum(gx, ant.previous_position, gf, ant.previous_fitness)
                dw = deposition_weight(t_now, t_prev, r)
            dx = dw * (gx - x)
        candidate = np.minimum(np.maximum(x + dx, lower), upper)
        cf, cv = ev(candidate)
        _check_finite(cf, i, iteration, problem.name)
        if violation_dominates(cf, cv, ant.fitness, ant.violation):
            _move(ant, candidate, cf, cv)
            ant.stored_dw = dw
            ant.reuse_dw = False
        elif not reused:
            # a rejected reuse step does not re-arm; the next one recomputes dw
            ant.reuse_dw = True

        mutant = polynomial_mutation(ant.position, lower, upper, config.mutation, rng)
        mf, mv = ev(mutant)
        _check_finite(mf, i, iteration, problem.name)
        archive.try_insert(mutant, mf, mv)
        if violation_dominates(mf, mv, ant.fitness, ant.violation):
            _move(ant, mutant, mf, mv)
        archive.try_insert(ant.position, ant.fitness, ant.violation)
    archive.rebuild_grid()


def initialize(problem: Problem, config: RunConfig, rng: np.random.Generator,
               evaluator: Optional[_Evaluator] = None) -> tuple[list[WorkerAnt], Archive]:
    ev = evaluator if evaluator is not None else _Evaluator(problem)
    archive = Archive(config.archive_capacity, config.grid_divisions, config.inflation,
                      config.remove_count, config.guide_cell_count, rng=rng)
    X = rng.uniform(problem.lower, problem.upper, size=(config.population_size, problem.dim))
    population = []
    for i, x in enumerate(X):
        f, v = ev(x)
        _check_finite(f, i, 0, problem.name)
        population.append(WorkerAnt(position=x, previous_position=x.copy(), fitness=f,
                                    previous_fitness=f.copy(), stored_dw=float(rng.uniform(-1.0, 1.0)),
                                    violation=v, previous_violation=v))
    for ant in population:
        archive.try_insert(ant.position, ant.fitness, ant.violation)
    archive.rebuild_grid()
    return population, archive


def run(problem: Problem, config: RunConfig, reference: Optional[np.ndarray] = None,
        callback=None) -> RunResult:
    """Optimize ``problem``; bit-identical for equal (problem, config).

    ``reference`` enables a per-iteration IGD trace. ``callback(iteration,
    population, archive)`` is invoked after every iteration.
    """
    from .metrics import igd

    if not (np.all(np.isfinite(problem.lower)) and np.all(np.isfinite(problem.upper))):
        raise UsageError("problem bounds must be finite")
    rng = np.random.default_rng(config.seed)
    ev = _Evaluator(problem)
    population, archive = initialize(problem, config, rng, ev)
    sizes: list[int] = []
    igds: Optional[list[float]] = [] if reference is not None else None
    for t in range(config.iterations):
        step(population, archive, problem, config, rng, iteration=t, evaluator=ev)
        sizes.append(len(archive))
        if igds is not None:
            igds.append(igd(archive.objectives, reference).value)
        if callback is not None:
            callback(t, population, archive)
    echo = config.to_dict()
    echo["problem"] = problem.name
    echo["evaluations"] = ev.count
    return RunResult(final_decisions=archive.decisions, final_objectives=archive.objectives,
                     archive_size_trace=sizes, igd_trace=igds, config_echo=echo,
                     seed=config.seed, evaluations=ev.count)


def expected_evaluations(config: RunConfig) -> int:
    return config.population_size * (1 + 2 * config.iterations)


__all__ = [
    "EvaluationError", "MutationParams", "RunConfig", "RunResult", "WorkerAnt",
    "delta_position", "deposition_weight", "expected_evaluations", "initialize",
    "mutation_alpha", "polynomial_mutation", "run", "step", "tendency_sum",
]

