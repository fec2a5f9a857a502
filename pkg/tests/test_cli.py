import json

import pytest

from mcraqr.cli import main, resolve_threads
from mcraqr.errors import SchemaError
from mcraqr.tables import read_table


@pytest.fixture
def validation(tmp_path):
    p = tmp_path / "validation.json"
    p.write_text(json.dumps({"task": {"kind": "validation", "oracle_draws": 5}}))
    return p


def test_unknown_subcommand_is_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate", "--scenario", "x", "--out", str(tmp_path)])
    assert info.value.code == 2


def test_missing_arguments_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["capacity"])
    assert info.value.code == 2


def test_missing_scenario_file(tmp_path, capsys):
    assert main(["capacity", "--scenario", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert err.count("\n") == 1


def test_wrong_task_kind(validation, tmp_path):
    assert main(["capacity", "--scenario", str(validation), "--out", str(tmp_path / "o")]) == 2


def test_oracle_suite_passes(validation, tmp_path):
    out = tmp_path / "o"
    assert main(["oracle-suite", "--scenario", str(validation), "--out", str(out)]) == 0
    t = read_table(out / "oracle_suite.csv")
    assert all(t.column("passed"))
    assert t.meta["seed"] == 0


def test_seed_override_in_provenance(validation, tmp_path):
    out = tmp_path / "o"
    assert main(["validate-envelope", "--scenario", str(validation), "--out", str(out),
                 "--seed", "11"]) == 0
    assert read_table(out / "envelope_rate.csv").meta["seed"] == 11


def test_model_error_exit_code(tmp_path, capsys):
    p = tmp_path / "s.json"
    # a comb rate that leaves carriers outside the IF band
    p.write_text(json.dumps({"mfc": {"uniform_rates_hz": [30e6]}, "task": {"kind": "comms"}}))
    assert main(["capacity", "--scenario", str(p), "--out", str(tmp_path / "o")]) == 1
    assert capsys.readouterr().err.count("\n") == 1


def test_threads_resolution(monkeypatch):
    monkeypatch.delenv("MCRAQR_THREADS", raising=False)
    assert resolve_threads(None) == 1
    monkeypatch.setenv("MCRAQR_THREADS", "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(2) == 2
    monkeypatch.setenv("MCRAQR_THREADS", "many")
    with pytest.raises(SchemaError):
        resolve_threads(None)
    with pytest.raises(SchemaError):
        resolve_threads(0)


def test_bad_env_threads_exit_code(validation, tmp_path, monkeypatch):
    monkeypatch.setenv("MCRAQR_THREADS", "zero")
    assert main(["kappa-sweep", "--scenario", str(validation), "--out", str(tmp_path / "o")]) == 2


def test_kappa_sweep_thread_independent(validation, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["kappa-sweep", "--scenario", str(validation), "--out", str(a)]) == 0
    assert main(["kappa-sweep", "--scenario", str(validation), "--out", str(b),
                 "--threads", "3"]) == 0
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir()) and len(files) == 9
    for f in files:
        assert (a / f).read_bytes() == (b / f).read_bytes()
