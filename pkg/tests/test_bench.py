from __future__ import annotations

import csv

import numpy as np
import pytest

from mopbench.bench import (
    RunRecord,
    export_csv,
    export_front_csv,
    front_rows,
    nondominated_filter,
    run_benchmark,
    run_benchmark_traced,
    stable_seed,
    summarize,
)
from mopbench.core import SolverConfig
from mopbench.solver import Method

CONFIG = SolverConfig()


def small_records(runs=3):
    return run_benchmark(
        ["BK1"], [Method.BBDMO, Method.BBDMO_VM], runs=runs, master_seed=7, config=CONFIG
    )


def test_stable_seed_is_deterministic_and_sensitive():
    assert stable_seed(1, "BK1", 0) == stable_seed(1, "BK1", 0)
    assert stable_seed(1, "BK1", 0) != stable_seed(1, "BK1", 1)
    assert stable_seed(1, "BK1", 0) != stable_seed(2, "BK1", 0)


def test_same_initial_point_across_methods():
    records = small_records()
    by_key = {(r.method, r.run_index): r for r in records}
    for run_index in range(3):
        a = by_key[(Method.BBDMO.value, run_index)]
        b = by_key[(Method.BBDMO_VM.value, run_index)]
        assert np.array_equal(a.x0, b.x0)


def test_repeat_invocation_identical_except_time():
    first = small_records()
    second = small_records()
    for a, b in zip(first, second):
        assert (a.problem, a.method, a.run_index) == (b.problem, b.method, b.run_index)
        assert a.iterations == b.iterations
        assert a.fevals == b.fevals
        assert a.status == b.status
        assert np.array_equal(a.final_values, b.final_values)
        assert np.array_equal(a.final_point, b.final_point)


def test_bk1_mean_iterations_band():
    records = run_benchmark(["BK1"], [Method.BBDMO], runs=50, master_seed=42, config=CONFIG)
    summary = summarize(records)[0]
    assert 1.0 <= summary.mean_iter <= 3.0


def test_quadratic_instance_shared_vs_fresh():
    _, _, shared = run_benchmark_traced(
        ["QPa"], [Method.BBDMO], runs=2, master_seed=3, config=CONFIG
    )
    assert shared["QPa"][0] is shared["QPa"][1]
    _, _, fresh = run_benchmark_traced(
        ["QPa"], [Method.BBDMO], runs=2, master_seed=3, config=CONFIG,
        fresh_instance_per_run=True,
    )
    assert not np.array_equal(fresh["QPa"][0].a, fresh["QPa"][1].a)


def test_jobs_parallel_matches_serial():
    serial = run_benchmark(
        ["BK1"], [Method.BBDMO], runs=4, master_seed=9, config=CONFIG, jobs=1
    )
    parallel = run_benchmark(
        ["BK1"], [Method.BBDMO], runs=4, master_seed=9, config=CONFIG, jobs=3
    )
    for a, b in zip(serial, parallel):
        assert a.run_index == b.run_index
        assert np.array_equal(a.final_point, b.final_point)


def fake_record(problem="P", method="m", run_index=0, iters=5, fevals=7, status="Converged"):
    return RunRecord(
        problem=problem,
        method=method,
        run_index=run_index,
        iterations=iters,
        fevals=fevals,
        time_ms=1.0,
        status=status,
        final_values=np.array([1.0, 2.0]),
        final_point=np.array([0.5, -0.5]),
        x0=np.zeros(2),
    )


def test_summarize_single_and_mean():
    s = summarize([fake_record()])[0]
    assert s.mean_iter == 5 and s.mean_feval == 7 and s.converged_fraction == 1.0
    s = summarize([fake_record(iters=1), fake_record(iters=3, run_index=1)])[0]
    assert s.mean_iter == 2.0


def test_summarize_mixed_statuses_and_permutation_invariance():
    records = [
        fake_record(run_index=0),
        fake_record(run_index=1, status="MaxIterations"),
        fake_record(run_index=2),
        fake_record(run_index=3, status="LineSearchFailure"),
    ]
    s = summarize(records)[0]
    assert s.converged_fraction == 0.5
    s_rev = summarize(records[::-1])[0]
    assert s == s_rev


def test_summarize_empty_rejected():
    with pytest.raises(ValueError):
        summarize([])


def test_nondominated_filter_cases():
    keep = nondominated_filter([np.array([1.0, 2.0]), np.array([2.0, 1.0])])
    assert keep == [0, 1]
    keep = nondominated_filter([np.array([1.0, 1.0]), np.array([2.0, 2.0])])
    assert keep == [0]
    keep = nondominated_filter([np.array([1.0, 1.0]), np.array([1.0, 1.0])])
    assert keep == [0, 1]


def test_export_records_roundtrip(tmp_path):
    records = small_records()
    path = tmp_path / "records.csv"
    export_csv(records, path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(records)
    for row, record in zip(rows, records):
        assert row["problem"] == record.problem
        assert int(row["iters"]) == record.iterations
        assert float(row["time_ms"]) == record.time_ms
        assert float(row["f1"]) == record.final_values[0]
        assert float(row["f2"]) == record.final_values[1]


def test_export_summaries_roundtrip(tmp_path):
    summaries = summarize(small_records())
    path = tmp_path / "summary.csv"
    export_csv(summaries, path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(summaries)
    for row, s in zip(rows, summaries):
        assert float(row["mean_iter"]) == s.mean_iter
        assert float(row["converged_fraction"]) == s.converged_fraction


def test_export_empty_records_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    export_csv([], path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 1 and rows[0][0] == "problem"


def test_export_io_error_carries_path():
    with pytest.raises(OSError, match="no/such/dir"):
        export_csv(small_records(), "no/such/dir/records.csv")


def test_render_front_figure_edge_cases(tmp_path):
    from mopbench.plots import render_front_figure

    # nothing converged: nothing rendered
    records = [fake_record(status="MaxIterations")]
    assert not render_front_figure(records, "empty", tmp_path / "none.png")
    assert not (tmp_path / "none.png").exists()
    # converged pair renders a file
    records = [fake_record(run_index=0), fake_record(run_index=1)]
    assert render_front_figure(records, "pair", tmp_path / "pair.png")
    assert (tmp_path / "pair.png").stat().st_size > 0


def test_front_rows_mutually_nondominated(tmp_path):
    records = run_benchmark(
        ["BK1"], [Method.BBDMO_VM], runs=20, master_seed=1, config=CONFIG
    )
    front = front_rows(records)
    assert front
    values = [r.final_values for r in front]
    assert nondominated_filter(values) == list(range(len(values)))
    path = tmp_path / "front.csv"
    export_front_csv(records, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["f1", "f2", "x1", "x2"]
    assert len(rows) == len(front) + 1
