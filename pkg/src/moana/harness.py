"""Seeded experiment batches, CSV/JSON artifacts and comparison reports.

Config documents are YAML mappings. Recognized top-level keys::

    problems: [zdt1, mmf4]        # required, registry names
    seed: 2024                    # master seed (unsigned 64-bit)
    runs: 10                      # runs per problem
    reference_front_size: 1000
    out_dir: results
    record_igd_trace: false
    population: 500               # run settings; omitted ones take the
    iterations: 100               # reference defaults (welded_beam: 100/100/100)
    capacity: 500
    grid_divisions: 7
    inflation: 0.1
    mutation_index: 2.0
    mutation_probability: 0.5
    remove_count: 2
    guide_cell_count: 2
    dims: {zdt1: 30}              # optional ZDT dimensions
    overrides:                    # optional per-problem run settings
      welded_beam: {population: 100}
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np
import yaml
from scipy import stats

from .core import UsageError
from .engine import MutationParams, RunConfig, run
from .metrics import friedman_from_sums, igd, rank_table, wilcoxon_rank_sum
from .problems import REGISTRY, get_problem, sample_reference_front

ALGORITHM = "MOANA"
BASELINES = ["MOFDO", "MOPSO", "NSGA-III", "MODA"]

RUN_KEYS = {
    "population": "population_size",
    "iterations": "iterations",
    "capacity": "archive_capacity",
    "grid_divisions": "grid_divisions",
    "inflation": "inflation",
    "remove_count": "remove_count",
    "guide_cell_count": "guide_cell_count",
    "mutation_index": None,
    "mutation_probability": None,
}
INT_KEYS = {"population", "iterations", "capacity", "grid_divisions", "remove_count", "guide_cell_count"}
TOP_KEYS = {"problems", "seed", "runs", "reference_front_size", "out_dir", "record_igd_trace",
            "dims", "overrides"} | set(RUN_KEYS)

REFERENCE_DEFAULTS = {"population": 500, "iterations": 100, "capacity": 500, "grid_divisions": 7,
                  "inflation": 0.1, "mutation_index": 2.0, "mutation_probability": 0.5,
                  "remove_count": 2, "guide_cell_count": 2}
PROBLEM_DEFAULTS = {"welded_beam": {"population": 100, "iterations": 100, "capacity": 100}}


class ConfigError(UsageError):
    pass


@dataclass
class ExperimentConfig:
    problems: list[str]
    run_settings: dict[str, dict]
    seed: int = 2024
    runs: int = 10
    reference_front_size: int = 1000
    out_dir: Path = Path("results")
    record_igd_trace: bool = False
    dims: dict[str, int] = field(default_factory=dict)

    def run_config(self, problem: str, seed: int) -> RunConfig:
        s = self.run_settings[problem]
        return RunConfig(population_size=s["population"], iterations=s["iterations"],
                         archive_capacity=s["capacity"], grid_divisions=s["grid_divisions"],
                         inflation=s["inflation"],
                         mutation=MutationParams(s["mutation_index"], s["mutation_probability"]),
                         remove_count=s["remove_count"], guide_cell_count=s["guide_cell_count"],
                         seed=seed)


def _check_value(key: str, value, where: str):
    label = f"{where}{key}"
    if key in INT_KEYS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"field '{label}' must be an integer, got {value!r}")
        if value < (0 if key == "iterations" else 1):
            raise ConfigError(f"field '{label}' must be {'nonnegative' if key == 'iterations' else 'positive'}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field '{label}' must be a number, got {value!r}")
    value = float(value)
    if key == "inflation" and value < 0:
        raise ConfigError(f"field '{label}' must be nonnegative")
    if key == "mutation_index" and not value > 0:
        raise ConfigError(f"field '{label}' must be positive")
    if key == "mutation_probability" and not 0 <= value <= 1:
        raise ConfigError(f"field '{label}' must lie in [0, 1]")
    return value


def config_from_mapping(doc: Optional[dict], **cli) -> ExperimentConfig:
    """Validate a parsed document; non-None keyword arguments override its top level."""
    doc = dict(doc or {})
    for k, v in cli.items():
        if v is not None:
            doc[k] = v
    unknown = set(doc) - TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown field '{sorted(unknown)[0]}'")
    problems = doc.get("problems")
    if isinstance(problems, str):
        problems = [problems]
    if not problems or not isinstance(problems, list):
        raise ConfigError("field 'problems' must list at least one problem")
    problems = [str(p).strip().lower() for p in problems]
    for p in problems:
        if p not in REGISTRY:
            raise ConfigError(f"field 'problems': problem not in registry: {p}")
    if len(set(problems)) != len(problems):
        raise ConfigError("field 'problems' lists a problem twice")

    top = {k: _check_value(k, doc[k], "") for k in RUN_KEYS if k in doc}
    overrides = doc.get("overrides") or {}
    if not isinstance(overrides, dict):
        raise ConfigError("field 'overrides' must be a mapping of problem -> settings")
    settings = {}
    for p in problems:
        merged = dict(REFERENCE_DEFAULTS)
        merged.update(PROBLEM_DEFAULTS.get(p, {}))
        merged.update(top)
        extra = overrides.get(p) or {}
        if not isinstance(extra, dict):
            raise ConfigError(f"field 'overrides.{p}' must be a mapping")
        for k, v in extra.items():
            if k not in RUN_KEYS:
                raise ConfigError(f"unknown field 'overrides.{p}.{k}'")
            merged[k] = _check_value(k, v, f"overrides.{p}.")
        settings[p] = merged
    for p in overrides:
        if p not in problems:
            raise ConfigError(f"field 'overrides': {p} is not among the configured problems")

    seed = doc.get("seed", 2024)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("field 'seed' must be an unsigned 64-bit integer")
    runs = doc.get("runs", 10)
    if isinstance(runs, bool) or not isinstance(runs, int) or runs < 1:
        raise ConfigError("field 'runs' must be a positive integer")
    ref = doc.get("reference_front_size", 1000)
    if isinstance(ref, bool) or not isinstance(ref, int) or ref < 2:
        raise ConfigError("field 'reference_front_size' must be an integer >= 2")
    dims = doc.get("dims") or {}
    if not isinstance(dims, dict):
        raise ConfigError("field 'dims' must be a mapping")
    for p, d in dims.items():
        if p not in problems or not p.startswith("zdt"):
            raise ConfigError(f"field 'dims.{p}': only configured ZDT problems take a dimension")
        if isinstance(d, bool) or not isinstance(d, int) or d < 2:
            raise ConfigError(f"field 'dims.{p}' must be an integer >= 2")
    trace = doc.get("record_igd_trace", False)
    if not isinstance(trace, bool):
        raise ConfigError("field 'record_igd_trace' must be true or false")
    return ExperimentConfig(problems=problems, run_settings=settings, seed=seed, runs=runs,
                            reference_front_size=ref, out_dir=Path(doc.get("out_dir", "results")),
                            record_igd_trace=trace, dims=dict(dims))


def parse_config(text: str, **cli) -> ExperimentConfig:
    try:
        doc = yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config document: {exc}") from exc
    if doc is not None and not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping")
    return config_from_mapping(doc, **cli)


def derive_seed(master: int, problem: str, run_index: int) -> int:
    """Stable 64-bit child seed for one (problem, run) job."""
    digest = hashlib.blake2b(f"{master}|{problem}|{run_index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


# ---------------------------------------------------------------------------
# running


@dataclass
class ResultRow:
    problem: str
    algorithm: str
    run: int
    seed: int
    igd: float
    front_size: int
    evaluations: int


@dataclass
class StatsRow:
    problem: str
    algorithm: str
    runs: int
    igd_mean: float
    igd_std: float
    igd_best: float
    igd_worst: float


def aggregate(rows: list[ResultRow]) -> list[StatsRow]:
    out = []
    for problem in dict.fromkeys(r.problem for r in rows):
        vals = np.array([r.igd for r in rows if r.problem == problem])
        std = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
        out.append(StatsRow(problem, ALGORITHM, len(vals), float(np.mean(vals)), std,
                            float(vals.min()), float(vals.max())))
    return out


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, header: list[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")


def _ensure_writable(out: Path) -> None:
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc}") from exc


def run_experiment(config: ExperimentConfig, log=None) -> list[ResultRow]:
    """Execute every (problem, run) job and write the CSV/JSON artifacts to ``config.out_dir``."""
    out = Path(config.out_dir)
    _ensure_writable(out)
    (out / "fronts").mkdir(exist_ok=True)
    rows: list[ResultRow] = []
    for name in config.problems:
        problem = get_problem(name, config.dims.get(name))
        reference = sample_reference_front(name, config.reference_front_size).points
        trace_rows = []
        for k in range(config.runs):
            seed = derive_seed(config.seed, name, k)
            cfg = config.run_config(name, seed)
            result = run(problem, cfg, reference=reference if config.record_igd_trace else None)
            value = igd(result.final_objectives, reference).value
            rows.append(ResultRow(name, ALGORITHM, k, seed, value, len(result.final_objectives),
                                  result.evaluations))
            F, X = result.final_objectives, result.final_decisions
            header = (["run", "iteration"] + [f"f{j + 1}" for j in range(F.shape[1])]
                      + [f"x{j + 1}" for j in range(X.shape[1])])
            _write_csv(out / "fronts" / f"{name}_run{k:03d}.csv", header,
                       ([k, cfg.iterations, *f.tolist(), *x.tolist()] for f, x in zip(F, X)))
            for t, size in enumerate(result.archive_size_trace):
                extra = [result.igd_trace[t]] if result.igd_trace is not None else []
                trace_rows.append([k, t + 1, size, *extra])
            if log:
                log(f"{name} run {k}: igd={value:.6g} front={len(F)}")
        header = ["run", "iteration", "archive_size"] + (["igd"] if config.record_igd_trace else [])
        _write_csv(out / f"trace_{name}.csv", header, trace_rows)
    _write_csv(out / "runs.csv", ["problem", "algorithm", "run", "seed", "igd", "front_size", "evaluations"],
               ([r.problem, r.algorithm, r.run, r.seed, r.igd, r.front_size, r.evaluations] for r in rows))
    summary = aggregate(rows)
    stat_header = ["problem", "algorithm", "runs", "igd_mean", "igd_std", "igd_best", "igd_worst"]
    _write_csv(out / "stats.csv", stat_header,
               ([s.problem, s.algorithm, s.runs, s.igd_mean, s.igd_std, s.igd_best, s.igd_worst]
                for s in summary))
    (out / "stats.json").write_text(
        json.dumps([s.__dict__ for s in summary], indent=2, sort_keys=True) + "\n", encoding="utf-8")
    echo = {"seed": config.seed, "runs": config.runs, "problems": config.problems,
            "reference_front_size": config.reference_front_size, "dims": config.dims,
            "record_igd_trace": config.record_igd_trace, "run_settings": config.run_settings}
    (out / "config_echo.json").write_text(json.dumps(echo, indent=2, sort_keys=True) + "\n",
                                          encoding="utf-8")
    return rows


# ---------------------------------------------------------------------------
# comparison


def _read_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(lines))


def load_published() -> dict[str, dict[str, dict[str, float]]]:
    """``{problem: {algorithm: {igd_mean, igd_std, ...}}}`` from the bundled data file."""
    text = resources.files("moana").joinpath("data/published_igd.csv").read_text(encoding="utf-8")
    out: dict = {}
    for row in _read_csv(text):
        vals = {k: float(row[k]) for k in ("igd_mean", "igd_std", "igd_best", "igd_worst") if row[k]}
        out.setdefault(row["problem"], {})[row["algorithm"]] = vals
    return out


def load_published_ranks() -> tuple[list[str], list[str], np.ndarray]:
    text = resources.files("moana").joinpath("data/published_ranks.csv").read_text(encoding="utf-8")
    rows = _read_csv(text)
    algorithms = [a for a in rows[0] if a != "problem"]
    ranks = np.array([[int(r[a]) for a in algorithms] for r in rows])
    return [r["problem"] for r in rows], algorithms, ranks


def pseudo_sample(mean: float, std: float, size: int) -> np.ndarray:
    """Deterministic normal-quantile sample with the published mean and std."""
    q = (np.arange(1, size + 1) - 0.5) / size
    return mean + std * stats.norm.ppf(q)


def compare(stats_rows: list[dict], published: dict, runs: Optional[list[dict]] = None,
            min_wilcoxon_runs: int = 10) -> dict:
    """Rank table, Friedman test and rank-sum p-values of measured MOANA vs published baselines.

    Measured MOANA means replace the published MOANA column. Rank-sum tests
    compare the per-run IGDs against a normal-quantile pseudo-sample built
    from each baseline's published mean and std, so those p-values are
    approximate.
    """
    notices: list[str] = []
    measured = {r["problem"]: float(r["igd_mean"]) for r in stats_rows
                if r.get("algorithm", ALGORITHM) == ALGORITHM}
    functions = [p for p in measured if p in published]
    for p in measured:
        if p not in published:
            notices.append(f"{p}: no published values, left out of the rank table")
    report: dict = {"functions": functions, "notices": notices}
    if not functions:
        notices.append("no comparable functions; nothing to rank")
        return report
    algorithms = [ALGORITHM] + [a for a in BASELINES if all(a in published[p] for p in functions)]
    means = np.array([[measured[p]] + [published[p][a]["igd_mean"] for a in algorithms[1:]]
                      for p in functions])
    table = rank_table(means, functions, algorithms)
    report["algorithms"] = algorithms
    report["means"] = means.tolist()
    report["ranks"] = table.ranks.tolist()
    report["column_sums"] = table.column_sums.tolist()
    if len(algorithms) < 3:
        notices.append("fewer than 3 algorithm columns; Friedman test skipped")
    elif len(functions) < 2:
        notices.append("fewer than 2 functions; Friedman test skipped")
    else:
        fr = friedman_from_sums(table.column_sums, len(functions))
        report["friedman"] = {"chi_square": fr.chi_square, "df": fr.df, "p_value": fr.p_value,
                              "critical_value": fr.critical_value,
                              "significant_at_0_05": fr.significant_at_0_05}
    wilcoxon = []
    for p in functions:
        samples = [float(r["igd"]) for r in (runs or []) if r["problem"] == p]
        if len(samples) < min_wilcoxon_runs:
            notices.append(f"{p}: {len(samples)} per-run IGD values, rank-sum tests need {min_wilcoxon_runs}")
            continue
        for a in algorithms[1:]:
            pub = published[p][a]
            if not (math.isfinite(pub["igd_mean"]) and math.isfinite(pub["igd_std"])):
                continue
            ps = wilcoxon_rank_sum(samples, pseudo_sample(pub["igd_mean"], pub["igd_std"], len(samples)))
            wilcoxon.append({"problem": p, "versus": a, "p_value": ps})
    report["wilcoxon"] = wilcoxon
    return report


def write_compare_report(report: dict, out: Path) -> None:
    _ensure_writable(out)
    if "ranks" in report:
        header = ["problem"] + report["algorithms"]
        rows = [[p, *r] for p, r in zip(report["functions"], report["ranks"])]
        rows.append(["total", *report["column_sums"]])
        _write_csv(out / "rank_table.csv", header, rows)
    if report.get("wilcoxon"):
        _write_csv(out / "wilcoxon.csv", ["problem", "versus", "p_value"],
                   ([w["problem"], w["versus"], w["p_value"]] for w in report["wilcoxon"]))
    (out / "compare.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                      encoding="utf-8")


def compare_files(stats_csv: Path, out: Optional[Path] = None) -> dict:
    stats_csv = Path(stats_csv)
    stats_rows = _read_csv(stats_csv.read_text(encoding="utf-8"))
    runs_csv = stats_csv.with_name("runs.csv")
    runs = _read_csv(runs_csv.read_text(encoding="utf-8")) if runs_csv.exists() else None
    report = compare(stats_rows, load_published(), runs)
    write_compare_report(report, Path(out) if out is not None else stats_csv.parent)
    return report


def write_reference_front(problem: str, count: int, path: Optional[Path] = None) -> str:
    front = sample_reference_front(problem, count).points
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"f{j + 1}" for j in range(front.shape[1])])
    for f in front:
        w.writerow([repr(float(v)) for v in f])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="")
    return text


