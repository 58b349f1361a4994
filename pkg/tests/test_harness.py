import csv
import io
import json

import numpy as np
import pytest

from moana import harness
from moana.harness import (ConfigError, compare, derive_seed, load_published, load_published_ranks,
                           parse_config, run_experiment)
from moana.metrics import friedman_from_sums
from moana.problems import get_problem
from oracles import hand_friedman, has_dominated_pair, nondominated_rows

SMALL = """
problems: [zdt1, welded_beam]
runs: 2
population: 20
iterations: 4
capacity: 15
reference_front_size: 50
dims: {zdt1: 5}
"""


def _rows(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


def test_defaults_follow_the_reference_setup():
    cfg = parse_config("problems: [zdt1]")
    s = cfg.run_settings["zdt1"]
    assert (s["population"], s["iterations"], s["capacity"], s["grid_divisions"], s["inflation"]) \
        == (500, 100, 500, 7, 0.1)
    assert (s["mutation_index"], s["mutation_probability"]) == (2.0, 0.5)
    assert cfg.runs == 10 and cfg.reference_front_size == 1000
    rc = cfg.run_config("zdt1", 5)
    assert rc.population_size == 500 and rc.seed == 5


def test_welded_beam_defaults_and_overrides():
    cfg = parse_config("problems: [welded_beam, zdt2]")
    wb = cfg.run_settings["welded_beam"]
    assert (wb["population"], wb["iterations"], wb["capacity"]) == (100, 100, 100)
    cfg = parse_config("problems: [welded_beam]\noverrides: {welded_beam: {capacity: 50}}")
    assert cfg.run_settings["welded_beam"]["capacity"] == 50
    cfg = parse_config("problems: [welded_beam]\npopulation: 30")
    assert cfg.run_settings["welded_beam"]["population"] == 30


def test_zero_iterations_is_valid():
    assert parse_config("problems: [zdt1]\niterations: 0").run_settings["zdt1"]["iterations"] == 0


@pytest.mark.parametrize("text,field", [
    ("problems: [mmf9]", "problem not in registry"),
    ("problems: [zdt1]\npopulation: 0", "population"),
    ("problems: [zdt1]\ncapacity: -3", "capacity"),
    ("problems: [zdt1]\nruns: 0", "runs"),
    ("problems: [zdt1]\nreference_front_size: 1", "reference_front_size"),
    ("problems: [zdt1]\ngrid_divisions: two", "grid_divisions"),
    ("problems: [zdt1]\nmutation_probability: 2", "mutation_probability"),
    ("problems: [zdt1]\ncolour: red", "colour"),
    ("problems: [zdt1]\noverrides: {zdt1: {iterations: -1}}", "overrides.zdt1.iterations"),
    ("problems: [zdt1]\ndims: {mmf1: 3}", "dims.mmf1"),
    ("problems: [", "malformed"),
    ("- just\n- a list", "mapping"),
    ("runs: 3", "problems"),
])
def test_config_errors_name_the_field(text, field):
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        parse_config(text)


def test_cli_style_overrides():
    cfg = parse_config("problems: [zdt1]\nruns: 4", runs=2, seed=9, iterations=None)
    assert cfg.runs == 2 and cfg.seed == 9
    assert cfg.run_settings["zdt1"]["iterations"] == 100


def test_derived_seeds_are_stable_and_distinct():
    seeds = {derive_seed(2024, p, k) for p in ("zdt1", "zdt2", "mmf4") for k in range(200)}
    assert len(seeds) == 600
    assert derive_seed(1, "zdt1", 0) == derive_seed(1, "zdt1", 0)
    assert derive_seed(1, "zdt1", 0) != derive_seed(2, "zdt1", 0)
    assert all(0 <= s < 2 ** 64 for s in seeds)


def test_run_experiment_artifacts(tmp_path):
    cfg = parse_config(SMALL, out_dir=str(tmp_path))
    rows = run_experiment(cfg)
    assert len(rows) == 4
    stats = _rows(tmp_path / "stats.csv")
    assert [r["problem"] for r in stats] == ["zdt1", "welded_beam"]
    for r in stats:
        assert int(r["runs"]) == 2 and float(r["igd_std"]) >= 0
        assert float(r["igd_best"]) <= float(r["igd_mean"]) <= float(r["igd_worst"])
        vals = [x.igd for x in rows if x.problem == r["problem"]]
        assert float(r["igd_mean"]) == pytest.approx(np.mean(vals))
        assert float(r["igd_std"]) == pytest.approx(np.std(vals, ddof=1))
    mirror = json.loads((tmp_path / "stats.json").read_text())
    assert [m["problem"] for m in mirror] == ["zdt1", "welded_beam"]
    trace = _rows(tmp_path / "trace_welded_beam.csv")
    assert len(trace) == 2 * 4 and trace[0]["iteration"] == "1"
    front = _rows(tmp_path / "fronts" / "zdt1_run000.csv")
    assert list(front[0]) == ["run", "iteration", "f1", "f2"] + [f"x{i}" for i in range(1, 6)]
    F = np.array([[float(r["f1"]), float(r["f2"])] for r in front])
    assert not has_dominated_pair(F)
    X = np.array([[float(r[f"x{i}"]) for i in range(1, 6)] for r in front])
    assert np.allclose(get_problem("zdt1", 5).evaluate(X), F)
    runs = _rows(tmp_path / "runs.csv")
    assert {int(r["seed"]) for r in runs} == {derive_seed(2024, p, k)
                                              for p in ("zdt1", "welded_beam") for k in range(2)}
    assert all(b"\r" not in p.read_bytes() for p in tmp_path.rglob("*.csv"))


def test_zero_iterations_front_is_initial_nondominated_set(tmp_path):
    cfg = parse_config("problems: [zdt2]\nruns: 1\niterations: 0\npopulation: 12\ndims: {zdt2: 4}\n"
                       "reference_front_size: 10", out_dir=str(tmp_path))
    run_experiment(cfg)
    front = _rows(tmp_path / "fronts" / "zdt2_run000.csv")
    got = sorted((float(r["f1"]), float(r["f2"])) for r in front)
    p = get_problem("zdt2", 4)
    rng = np.random.default_rng(derive_seed(2024, "zdt2", 0))
    X = rng.uniform(p.lower, p.upper, size=(12, 4))
    F = p.evaluate(X)
    assert got == sorted(map(tuple, nondominated_rows(F).tolist()))


def test_unwritable_output_fails_before_running(tmp_path, monkeypatch):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = parse_config(SMALL, out_dir=str(blocker / "sub"))
    monkeypatch.setattr(harness, "run", lambda *a, **k: pytest.fail("ran before the I/O check"))
    with pytest.raises(OSError, match="not writable"):
        run_experiment(cfg)


def test_published_tables_load():
    pub = load_published()
    assert pub["zdt1"]["MOANA"]["igd_mean"] == 0.0507
    assert pub["zdt2"]["MOANA"]["igd_mean"] == 0.016884
    assert pub["mmf4"]["MOANA"]["igd_mean"] == 0.025601
    assert set(pub["zdt1"]) == {"MOANA", "MOFDO", "MOPSO", "NSGA-III", "MODA"}
    assert len(pub) == 17
    functions, algorithms, ranks = load_published_ranks()
    assert len(functions) == 17 and algorithms[0] == "MOANA"
    assert ranks.shape == (17, 5) and ranks.min() >= 1 and ranks.max() <= 5


def test_compare_substitutes_measured_mean():
    rep = compare([{"problem": "zdt1", "algorithm": "MOANA", "igd_mean": "0.0507"}], load_published())
    assert rep["ranks"] == [[1, 2, 4, 5, 3]]
    assert "friedman" not in rep
    assert any("Friedman" in n for n in rep["notices"])


def test_compare_all_equal_means_tie_at_one():
    pub = {p: {a: {"igd_mean": 1.0, "igd_std": 0.1} for a in harness.BASELINES} for p in ("a", "b")}
    stats = [{"problem": p, "algorithm": "MOANA", "igd_mean": "1.0"} for p in ("a", "b")]
    rep = compare(stats, pub)
    assert rep["ranks"] == [[1] * 5, [1] * 5]


def test_compare_needs_three_algorithms():
    pub = {p: {"MOFDO": {"igd_mean": 0.2, "igd_std": 0.1}} for p in ("a", "b")}
    stats = [{"problem": p, "algorithm": "MOANA", "igd_mean": "0.1"} for p in ("a", "b")]
    rep = compare(stats, pub)
    assert "friedman" not in rep and any("fewer than 3" in n for n in rep["notices"])


def test_compare_end_to_end_friedman_and_wilcoxon(tmp_path):
    pub = load_published()
    names = ["zdt1", "zdt2", "zdt3", "mmf1", "mmf4"]
    stats = [{"problem": p, "algorithm": "MOANA", "igd_mean": repr(pub[p]["MOANA"]["igd_mean"])}
             for p in names]
    runs = [{"problem": "zdt1", "igd": repr(0.004 + 0.0001 * k)} for k in range(10)]
    rep = compare(stats, pub, runs)
    sums = rep["column_sums"]
    assert rep["friedman"]["chi_square"] == pytest.approx(float(hand_friedman(sums, 5)), abs=1e-9)
    assert rep["friedman"]["chi_square"] == friedman_from_sums(sums, 5).chi_square
    assert {w["versus"] for w in rep["wilcoxon"]} == set(harness.BASELINES)
    assert all(w["problem"] == "zdt1" for w in rep["wilcoxon"])
    assert all(0 < w["p_value"] <= 1 for w in rep["wilcoxon"])
    harness.write_compare_report(rep, tmp_path)
    table = _rows(tmp_path / "rank_table.csv")
    assert table[-1]["problem"] == "total"
    assert (tmp_path / "wilcoxon.csv").exists() and (tmp_path / "compare.json").exists()


def test_pseudo_sample_moments():
    s = harness.pseudo_sample(2.0, 0.5, 400)
    assert s.mean() == pytest.approx(2.0, abs=1e-12)
    assert s.std(ddof=1) == pytest.approx(0.5, rel=0.02)


def test_reference_front_csv(tmp_path):
    text = harness.write_reference_front("zdt2", 3, tmp_path / "f.csv")
    assert text.splitlines() == ["f1,f2", "0.0,1.0", "0.5,0.75", "1.0,0.0"]
    assert (tmp_path / "f.csv").read_text() == text
