from __future__ import annotations

import csv

import pytest

from mopbench.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, _expand_problems, main
from mopbench.core import ConfigError


def test_list_prints_registry(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in ("BK1", "JOS1a", "QPa", "QPg"):
        assert name in out


def test_expand_problem_ranges():
    names = ["BK1", "JOS1a", "QPa", "QPb", "QPc", "QPd"]
    assert _expand_problems("BK1,QPa..QPc", names) == ["BK1", "QPa", "QPb", "QPc"]
    assert _expand_problems("QPa,QPa", names) == ["QPa"]
    with pytest.raises(ConfigError):
        _expand_problems("QPa..QPz", names)
    with pytest.raises(ConfigError):
        _expand_problems("", names)


def test_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / "records.csv"
    summary = tmp_path / "summary.csv"
    fronts = tmp_path / "fronts"
    code = main(
        [
            "run",
            "--problems",
            "BK1",
            "--methods",
            "bbdmo,bbdmo_vm",
            "--runs",
            "5",
            "--seed",
            "3",
            "--out",
            str(out),
            "--summary",
            str(summary),
            "--fronts",
            str(fronts),
        ]
    )
    assert code == EXIT_OK
    table = capsys.readouterr().out
    assert "BK1" in table and "bbdmo_vm" in table
    with open(out, newline="") as fh:
        assert len(list(csv.DictReader(fh))) == 10
    with open(summary, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert {row["method"] for row in rows} == {"bbdmo", "bbdmo_vm"}
    for method in ("bbdmo", "bbdmo_vm"):
        assert (fronts / f"BK1_{method}.csv").exists()
        assert (fronts / f"BK1_{method}.png").exists()


def test_run_no_plots_skips_figures(tmp_path):
    fronts = tmp_path / "fronts"
    code = main(
        [
            "run", "--problems", "BK1", "--methods", "bbdmo", "--runs", "2",
            "--seed", "1", "--fronts", str(fronts), "--no-plots",
        ]
    )
    assert code == EXIT_OK
    assert (fronts / "BK1_bbdmo.csv").exists()
    assert not (fronts / "BK1_bbdmo.png").exists()


def test_unknown_method_is_config_error(capsys):
    code = main(["run", "--problems", "BK1", "--methods", "gradient", "--runs", "1"])
    assert code == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_unknown_problem_is_config_error():
    assert main(["run", "--problems", "ZZZ", "--runs", "1"]) == EXIT_CONFIG


def test_bad_solver_parameter_is_config_error():
    code = main(["run", "--problems", "BK1", "--runs", "1", "--sigma", "2.0"])
    assert code == EXIT_CONFIG


def test_unwritable_output_is_io_error(tmp_path):
    code = main(
        [
            "run", "--problems", "BK1", "--methods", "bbdmo", "--runs", "1",
            "--out", str(tmp_path / "missing_dir" / "records.csv"),
        ]
    )
    assert code == EXIT_IO


def test_env_seed_overrides_flag(tmp_path, monkeypatch):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    main(["run", "--problems", "BK1", "--methods", "bbdmo", "--runs", "2",
          "--seed", "111", "--out", str(out_a)])
    monkeypatch.setenv("MOPBENCH_SEED", "111")
    main(["run", "--problems", "BK1", "--methods", "bbdmo", "--runs", "2",
          "--seed", "999", "--out", str(out_b)])
    with open(out_a, newline="") as fh:
        rows_a = [(r["iters"], r["f1"], r["f2"]) for r in csv.DictReader(fh)]
    with open(out_b, newline="") as fh:
        rows_b = [(r["iters"], r["f1"], r["f2"]) for r in csv.DictReader(fh)]
    assert rows_a == rows_b


def test_invalid_env_seed_is_config_error(monkeypatch):
    monkeypatch.setenv("MOPBENCH_SEED", "not-a-number")
    code = main(["run", "--problems", "BK1", "--methods", "bbdmo", "--runs", "1"])
    assert code == EXIT_CONFIG
