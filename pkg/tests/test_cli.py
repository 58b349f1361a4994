import hashlib

from moana.cli import main


def test_fronts_to_stdout(capsys):
    assert main(["fronts", "ZDT1", "--count", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "f1,f2" and len(out) == 4


def test_fronts_to_directory(tmp_path):
    assert main(["fronts", "mmf4", "--count", "20", "--out-dir", str(tmp_path)]) == 0
    assert len((tmp_path / "mmf4_front.csv").read_text().splitlines()) == 21


def test_unknown_problem_exits_nonzero(capsys):
    assert main(["fronts", "mmf9"]) != 0
    err = capsys.readouterr().err
    assert "problem not in registry" in err and len(err.strip().splitlines()) == 1


def test_bad_config_exits_nonzero(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("problems: [zdt1]\npopulation: 0\n")
    assert main(["run", str(cfg)]) != 0
    assert "population" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.yaml")]) != 0


def test_run_then_compare(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("problems: [zdt1, zdt2, mmf4]\nreference_front_size: 40\ndims: {zdt1: 4, zdt2: 4}\n")
    out = tmp_path / "out"
    args = ["run", str(cfg), "--out-dir", str(out), "--runs", "2", "--iterations", "2",
            "--population", "10", "--capacity", "10", "--seed", "7", "--quiet"]
    assert main(args) == 0
    digest = hashlib.sha256((out / "stats.csv").read_bytes()).hexdigest()
    assert main(args) == 0
    assert hashlib.sha256((out / "stats.csv").read_bytes()).hexdigest() == digest
    assert main(["compare", str(out / "stats.csv")]) == 0
    text = capsys.readouterr().out
    assert "rank sums" in text and "friedman chi2=" in text
    assert (out / "rank_table.csv").exists()
