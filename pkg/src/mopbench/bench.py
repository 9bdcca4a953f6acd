"""Benchmark harness: seeded multi-run experiments, aggregation and CSV export.

Seeding contract
----------------
The per-run initial point derives from ``(master_seed, problem, run_index)``
and never from the method, so every method sees the identical start for a
given (problem, run) pair. Quadratic instances derive their generator seed
from ``(master_seed, problem)``: one shared instance per problem name per
invocation, isolating initial-point variance. ``fresh_instance_per_run``
regenerates the instance per run index instead (still shared across
methods).

Runs may execute in a thread pool; records are sorted by
``(problem, method, run_index)`` before export, so the output is
order-deterministic regardless of scheduling.
"""

from __future__ import annotations

import csv
import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import Array, SolveTrace, SolverConfig, Status
from .problems import Problem, ProblemRegistry, default_registry, sample_initial
from .solver import Method, run

__all__ = [
    "RunRecord",
    "Summary",
    "stable_seed",
    "run_benchmark",
    "run_benchmark_traced",
    "summarize",
    "nondominated_filter",
    "export_csv",
    "front_rows",
    "export_front_csv",
]


@dataclass(frozen=True, eq=False)
class RunRecord:
    """Outcome of one (problem, method, run) cell."""

    problem: str
    method: str
    run_index: int
    iterations: int
    fevals: int
    time_ms: float
    status: str
    final_values: Array
    final_point: Array
    x0: Array


@dataclass(frozen=True)
class Summary:
    problem: str
    method: str
    mean_iter: float
    mean_feval: float
    mean_time_ms: float
    converged_fraction: float


def stable_seed(*parts) -> int:
    """Deterministic 63-bit seed from arbitrary parts (process-independent)."""
    digest = hashlib.blake2b(
        "\x1f".join(str(p) for p in parts).encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big") >> 1


def _resolve_problems(
    names: list[str],
    registry: ProblemRegistry,
    master_seed: int,
    runs: int,
    fresh_instance_per_run: bool,
) -> dict[str, list[Problem]]:
    """Instance per problem name; per run index when regeneration is on."""
    resolved: dict[str, list[Problem]] = {}
    for name in names:
        if registry.is_template(name) and fresh_instance_per_run:
            resolved[name] = [
                registry.resolve(name, stable_seed(master_seed, name, r, "instance"))
                for r in range(runs)
            ]
        else:
            instance = registry.resolve(name, stable_seed(master_seed, name, "instance"))
            resolved[name] = [instance] * runs
    return resolved


def run_benchmark_traced(
    problem_names: list[str],
    methods: list[Method],
    runs: int,
    master_seed: int,
    config: SolverConfig | None = None,
    registry: ProblemRegistry | None = None,
    fresh_instance_per_run: bool = False,
    jobs: int = 1,
) -> tuple[list[RunRecord], dict[tuple[str, str, int], SolveTrace], dict[str, list[Problem]]]:
    """Like :func:`run_benchmark` but also returns traces and the resolved
    problem instances, keyed for post-hoc verification."""
    config = config or SolverConfig()
    registry = registry or default_registry()
    problems = _resolve_problems(
        problem_names, registry, master_seed, runs, fresh_instance_per_run
    )

    tasks = [
        (name, method, r)
        for name in problem_names
        for method in methods
        for r in range(runs)
    ]

    def execute(task):
        name, method, r = task
        problem = problems[name][r]
        x0 = sample_initial(problem, stable_seed(master_seed, name, r, "x0"))
        start = time.perf_counter()
        trace = run(method, problem, x0, config)
        elapsed_ms = (time.perf_counter() - start) * 1e3
        record = RunRecord(
            problem=name,
            method=method.value,
            run_index=r,
            iterations=trace.iterations,
            fevals=trace.fevals,
            time_ms=elapsed_ms,
            status=trace.status.value,
            final_values=trace.final_values,
            final_point=trace.final_point,
            x0=x0,
        )
        return record, trace

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(execute, tasks))
    else:
        outcomes = [execute(task) for task in tasks]

    order = sorted(range(len(tasks)), key=lambda i: (tasks[i][0], tasks[i][1].value, tasks[i][2]))
    records = [outcomes[i][0] for i in order]
    traces = {
        (tasks[i][0], tasks[i][1].value, tasks[i][2]): outcomes[i][1] for i in order
    }
    return records, traces, problems


def run_benchmark(
    problem_names: list[str],
    methods: list[Method],
    runs: int,
    master_seed: int,
    config: SolverConfig | None = None,
    registry: ProblemRegistry | None = None,
    fresh_instance_per_run: bool = False,
    jobs: int = 1,
) -> list[RunRecord]:
    records, _, _ = run_benchmark_traced(
        problem_names,
        methods,
        runs,
        master_seed,
        config,
        registry,
        fresh_instance_per_run,
        jobs,
    )
    return records


def summarize(records: list[RunRecord]) -> list[Summary]:
    """Group records by (problem, method) and average the count columns."""
    if not records:
        raise ValueError("cannot summarize an empty record list")
    groups: dict[tuple[str, str], list[RunRecord]] = {}
    for record in records:
        groups.setdefault((record.problem, record.method), []).append(record)
    summaries = []
    for (problem, method), group in sorted(groups.items()):
        converged = sum(r.status == Status.CONVERGED.value for r in group)
        summaries.append(
            Summary(
                problem=problem,
                method=method,
                mean_iter=float(np.mean([r.iterations for r in group])),
                mean_feval=float(np.mean([r.fevals for r in group])),
                mean_time_ms=float(np.mean([r.time_ms for r in group])),
                converged_fraction=converged / len(group),
            )
        )
    return summaries


def nondominated_filter(points: list[Array]) -> list[int]:
    """Indices of points not dominated by any other point in the list.

    A point p dominates q when p <= q componentwise and p != q; equal
    points do not dominate each other, so duplicates are all kept.
    """
    values = [np.asarray(p, dtype=float) for p in points]
    kept = []
    for i, q in enumerate(values):
        dominated = any(
            np.all(p <= q) and np.any(p < q) for j, p in enumerate(values) if j != i
        )
        if not dominated:
            kept.append(i)
    return kept


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def export_csv(rows: list, path) -> None:
    """Write records or summaries as RFC-4180 CSV with a header row.

    Reals are rendered with 17 significant digits so they parse back to the
    same doubles. Record rows end with the final objective values f1..fm.
    """
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            if not rows:
                writer.writerow(
                    ["problem", "method", "run", "iters", "fevals", "time_ms", "status"]
                )
                return
            if isinstance(rows[0], Summary):
                writer.writerow(
                    [
                        "problem",
                        "method",
                        "mean_iter",
                        "mean_feval",
                        "mean_time_ms",
                        "converged_fraction",
                    ]
                )
                for s in rows:
                    writer.writerow(
                        [
                            s.problem,
                            s.method,
                            _fmt(s.mean_iter),
                            _fmt(s.mean_feval),
                            _fmt(s.mean_time_ms),
                            _fmt(s.converged_fraction),
                        ]
                    )
            else:
                m = len(rows[0].final_values)
                header = ["problem", "method", "run", "iters", "fevals", "time_ms", "status"]
                header += [f"f{i + 1}" for i in range(m)]
                writer.writerow(header)
                for r in rows:
                    row = [
                        r.problem,
                        r.method,
                        r.run_index,
                        r.iterations,
                        r.fevals,
                        _fmt(r.time_ms),
                        r.status,
                    ]
                    row += [_fmt(float(v)) for v in r.final_values]
                    writer.writerow(row)
    except OSError as exc:
        raise OSError(f"failed to write {path}: {exc}") from exc


def front_rows(records: list[RunRecord]) -> list[RunRecord]:
    """Mutually nondominated converged terminal points of a record group."""
    converged = [r for r in records if r.status == Status.CONVERGED.value]
    if not converged:
        return []
    kept = nondominated_filter([r.final_values for r in converged])
    return [converged[i] for i in kept]


def export_front_csv(records: list[RunRecord], path) -> None:
    """One row per nondominated terminal point: f1..fm, x1..xn."""
    front = front_rows(records)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            m = len(records[0].final_values) if records else 0
            n = len(records[0].final_point) if records else 0
            writer.writerow(
                [f"f{i + 1}" for i in range(m)] + [f"x{j + 1}" for j in range(n)]
            )
            for r in front:
                writer.writerow(
                    [_fmt(float(v)) for v in r.final_values]
                    + [_fmt(float(v)) for v in r.final_point]
                )
    except OSError as exc:
        raise OSError(f"failed to write {path}: {exc}") from exc
