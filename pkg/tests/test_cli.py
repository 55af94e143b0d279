import csv
import json
import time

import pytest

from roughcalc import verify
from roughcalc.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, RunConfig, UsageError, main
from roughcalc.corpus import load_corpus, make_corpus, write_corpus


@pytest.fixture
def tiny_path(tmp_path):
    path = tmp_path / "tiny.json"
    assert main(["gen-corpus", "--preset", "tiny", "--out", str(path)]) == EXIT_OK
    return path


def test_gen_corpus_presets(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen-corpus", "--preset", "default20", "--out", str(a)]) == EXIT_OK
    assert main(["gen-corpus", "--preset", "default20", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert len(load_corpus(a)["entries"]) == 20
    c = tmp_path / "c.json"
    assert main(["gen-corpus", "--preset", "default20", "--seed", "3", "--out", str(c)]) == EXIT_OK
    assert c.read_bytes() != a.read_bytes()


def test_gen_corpus_tiny(tiny_path):
    assert len(json.loads(tiny_path.read_text())["entries"]) == 3


def test_gen_corpus_errors(tmp_path):
    assert main(["gen-corpus", "--preset", "huge", "--out", str(tmp_path / "x.json")]) == EXIT_USAGE
    assert main(["gen-corpus", "--preset", "tiny", "--out", str(tmp_path / "no" / "dir" / "x.json")]) == EXIT_USAGE


def test_gen_corpus_stdout(capsys):
    assert main(["gen-corpus", "--preset", "stress"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["preset"] == "stress"


@pytest.mark.parametrize("flags", [
    ["--checks", ""],
    ["--checks", "check_nonsense"],
    ["--levels", "64,63"],
    ["--levels", "8"],
    ["--levels", ""],
    ["--levels", "a,b"],
    ["--threads", "-1"],
])
def test_run_usage_errors(tiny_path, tmp_path, flags):
    assert main(["run", "--corpus", str(tiny_path), "--out", str(tmp_path / "o")] + flags) == EXIT_USAGE


def test_run_missing_or_invalid_corpus(tmp_path):
    assert main(["run", "--corpus", str(tmp_path / "missing.json")]) == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"format": "roughcalc-corpus", "version": 1, "entries": [{"id": "x"}]}))
    assert main(["run", "--corpus", str(bad)]) == EXIT_USAGE


def test_env_threads(tiny_path, tmp_path, monkeypatch):
    monkeypatch.setenv("ROUGHCALC_THREADS", "lots")
    assert main(["run", "--corpus", str(tiny_path), "--out", str(tmp_path / "o")]) == EXIT_USAGE


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig("x", checks=[])
    assert RunConfig("x", threads=3).resolved_threads() == 3
    assert RunConfig("x").resolved_threads() >= 1


def test_tiny_theorem1_budget(tiny_path, tmp_path):
    out = tmp_path / "out"
    t0 = time.perf_counter()
    code = main(["run", "--corpus", str(tiny_path), "--checks", "check_pointwise_theorem1",
                 "--levels", "64", "--out", str(out)])
    assert time.perf_counter() - t0 < 60
    assert code == EXIT_OK
    for name in ("reports.jsonl", "summary.csv", "timings.csv", "drift.csv", "constants.csv"):
        assert (out / name).exists()
    rows = list(csv.DictReader(open(out / "summary.csv")))
    assert len(rows) == 3 * 2
    assert {r["status"] for r in rows} == {"ok"}


def test_determinism_across_threads(tiny_path, tmp_path):
    args = ["--corpus", str(tiny_path), "--levels", "32,48", "--seed", "11",
            "--checks", "check_pointwise_theorem1,check_hedberg_split,check_sobolev_theorem2"]
    outs = []
    for k, threads in enumerate(("1", "2", "1")):
        out = tmp_path / f"r{k}"
        assert main(["run", "--out", str(out), "--threads", threads] + args) == EXIT_OK
        outs.append(out)
    for name in ("summary.csv", "drift.csv", "constants.csv"):
        first = (outs[0] / name).read_bytes()
        assert all((o / name).read_bytes() == first for o in outs[1:])


def test_failure_exit_code(tiny_path, tmp_path, monkeypatch):
    # an impossible drift window turns every drift into a failure
    monkeypatch.setattr(verify, "DRIFT_BOUNDS", (10.0, 20.0))
    code = main(["run", "--corpus", str(tiny_path), "--checks", "check_maximal_domination",
                 "--levels", "32,48", "--threads", "1", "--out", str(tmp_path / "o")])
    assert code == EXIT_FAIL


def test_convergence_table(tmp_path):
    doc = make_corpus("tiny")
    doc["entries"][0]["kernel"] = {"id": "zero", "kind": "zero"}
    path = tmp_path / "c.json"
    write_corpus(doc, path)
    out = tmp_path / "conv"
    assert main(["convergence", "--corpus", str(path), "--check", "check_pointwise_theorem1",
                 "--levels", "32,48", "--out", str(out)]) == EXIT_OK
    rows = list(csv.DictReader(open(out / "convergence_check_pointwise_theorem1.csv")))
    assert {"N", "ratio", "drift"} <= set(rows[0])
    second = [r for r in rows if r["N"] == "48"]
    zero_id = doc["entries"][0]["id"]
    for r in second:
        if r["entry_id"] == zero_id:
            assert r["drift_status"] == "skip" and r["drift"] == ""  # 0/0
        else:
            assert r["drift_status"] == "ok"


def test_convergence_needs_two_levels(tiny_path, tmp_path):
    assert main(["convergence", "--corpus", str(tiny_path), "--check", "check_hedberg_split",
                 "--levels", "64", "--out", str(tmp_path / "o")]) == EXIT_USAGE
    assert main(["convergence", "--corpus", str(tiny_path), "--check", "nope",
                 "--levels", "32,64", "--out", str(tmp_path / "o")]) == EXIT_USAGE
