"""Outer iteration drivers.

One driver covers all five methods; they differ in how the per-objective
scales and the metric evolve:

=========  ==============  =======================================
method     scales          metric
=========  ==============  =======================================
SDMO       all ones        identity
VMMO       all ones        single BFGS metric (aggregated y)
BBDMO      BB (Euclidean)  identity
QNMO       all ones        one BFGS metric per objective (Newton)
BBDMO_VM   BB w.r.t. B_k   BFGS trade-off metric
=========  ==============  =======================================

The Barzilai-Borwein variants need a secant pair before the first
iteration, so the driver bootstraps ``x^{-1} = x0 - eps * 1/sqrt(n)`` and
genuinely evaluates the Jacobian there: one extra gradient evaluation that
is recorded in the trace but never in the feval column. The first
BBDMO_VM iteration therefore runs with the identity metric and coincides
with BBDMO; the trade-off metric engages from iteration 1.

Iteration counting: an iteration is a direction subproblem that proceeds to
a line search. The subproblem whose direction already satisfies
``||d|| <= tol`` terminates the run and is not counted.
"""

from __future__ import annotations

import time
from dataclasses import replace
from enum import Enum

import numpy as np

from .core import (
    Array,
    BBScales,
    ConfigError,
    DimensionError,
    IterationRecord,
    LineSearchFailed,
    Metric,
    MetricBreakdown,
    NotDescentDirection,
    SimplexWeights,
    SolveTrace,
    SolverConfig,
    Status,
    SubproblemFailed,
)
from .directions import direction, direction_newton
from .dual import DualResult, solve_dual
from .linesearch import armijo
from .metrics import PerObjectiveBfgs, TradeoffState, aggregate_gradient, bfgs_update, update_tradeoff
from .problems import Problem, eval_jacobian, eval_objectives
from .scales import compute_alpha, compute_alpha_euclidean

__all__ = ["Method", "run", "verify_pareto_critical", "merit_w"]


class Method(Enum):
    SDMO = "sdmo"
    VMMO = "vmmo"
    BBDMO = "bbdmo"
    QNMO = "qnmo"
    BBDMO_VM = "bbdmo_vm"

    @classmethod
    def parse(cls, name: str) -> "Method":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ConfigError(
                f"unknown method {name!r}; choose from "
                f"{', '.join(m.value for m in cls)}"
            ) from None


_BB_METHODS = frozenset({Method.BBDMO, Method.BBDMO_VM})


def run(
    method: Method, problem: Problem, x0: Array, config: SolverConfig | None = None
) -> SolveTrace:
    """Drive one solver run to termination and record its trace.

    Subproblem and line-search failures are captured as trace statuses and
    never raised past this function.
    """
    config = config or SolverConfig()
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (problem.n,):
        raise DimensionError(f"x0 has shape {x.shape}, expected ({problem.n},)")
    if not np.all(np.isfinite(x)):
        raise ConfigError("x0 must be finite")

    trace = SolveTrace()
    start = time.perf_counter()

    f = eval_objectives(problem, x)
    jac = eval_jacobian(problem, x)
    trace.gradient_evals = 1

    s_prev = y_prev = None
    if method in _BB_METHODS:
        x_ghost = x - config.warmstart_eps * np.ones(problem.n) / np.sqrt(problem.n)
        jac_ghost = eval_jacobian(problem, x_ghost)
        trace.gradient_evals += 1
        s_prev = x - x_ghost
        y_prev = jac - jac_ghost

    metric = Metric.identity(problem.n)
    per_objective = (
        PerObjectiveBfgs.identity(problem.m, problem.n)
        if method is Method.QNMO
        else None
    )
    tradeoff: TradeoffState | None = None
    ones = BBScales.ones(problem.m)
    warm: Array | None = None
    fevals = 0
    status = Status.MAX_ITERATIONS

    for _ in range(config.max_iter):
        if method is Method.BBDMO:
            scales = compute_alpha_euclidean(
                s_prev, y_prev, config.alpha_min, config.alpha_max
            )
        elif method is Method.BBDMO_VM:
            scales = compute_alpha(
                s_prev, y_prev, metric, config.alpha_min, config.alpha_max
            )
        else:
            scales = ones

        try:
            if method is Method.QNMO:
                result = direction_newton(jac, per_objective.matrices(), config)
            else:
                result = direction(jac, scales, metric, config, warm_start=warm)
        except SubproblemFailed as exc:
            status = Status.SUBPROBLEM_FAILURE
            trace.message = str(exc)
            break
        warm = result.weights.lam
        d = result.direction
        dir_norm = float(np.linalg.norm(d))
        if dir_norm <= config.tol:
            status = Status.CONVERGED
            break

        slopes = jac @ d
        try:
            t, trial_evals, f_new = armijo(problem, x, f, d, slopes, config)
        except (NotDescentDirection, LineSearchFailed) as exc:
            status = Status.LINE_SEARCH_FAILURE
            trace.message = str(exc)
            break
        fevals += trial_evals
        x_new = x + t * d
        jac_new = eval_jacobian(problem, x_new)
        trace.gradient_evals += 1

        if method is Method.QNMO:
            dir_norm_b = float(np.sqrt(max(0.0, -2.0 * result.theta)))
        else:
            dir_norm_b = metric.norm(d)
        trace.records.append(
            IterationRecord(
                point=x,
                values=f,
                direction=d,
                dir_norm=dir_norm,
                dir_norm_b=dir_norm_b,
                step=t,
                fevals=fevals,
                weights=result.weights,
                scales=scales,
                theta=result.theta,
            )
        )

        if method in _BB_METHODS:
            s_prev = x_new - x
            y_prev = jac_new - jac
        if method is Method.VMMO:
            y = (jac_new - jac).T @ result.weights.lam
            try:
                metric = bfgs_update(metric, x_new - x, y)
            except MetricBreakdown:
                metric = Metric.identity(problem.n)
                trace.metric_resets += 1
        elif method is Method.BBDMO_VM:
            if tradeoff is None:
                tradeoff = TradeoffState(
                    metric=metric,
                    prev_weights=result.weights,
                    prev_scales=scales,
                    prev_agg_gradient=aggregate_gradient(jac, result.weights, scales),
                    prev_point=x,
                )
            try:
                tradeoff = update_tradeoff(tradeoff, x_new, jac_new)
            except MetricBreakdown:
                tradeoff = replace(tradeoff, metric=Metric.identity(problem.n))
                trace.metric_resets += 1
            tradeoff = tradeoff.recache(result.weights, scales, jac_new, x_new)
            metric = tradeoff.metric
        elif method is Method.QNMO:
            per_objective = _update_per_objective(
                per_objective, x_new - x, jac_new - jac, trace
            )

        x, f, jac = x_new, f_new, jac_new

    trace.status = status
    trace.final_point = x
    trace.final_values = f
    trace.wall_time = time.perf_counter() - start
    return trace


def _update_per_objective(
    state: PerObjectiveBfgs, s: Array, y_rows: Array, trace: SolveTrace
) -> PerObjectiveBfgs:
    updated = []
    for metric, y in zip(state.metrics, y_rows):
        try:
            updated.append(bfgs_update(metric, s, y))
        except MetricBreakdown:
            updated.append(Metric.identity(metric.n))
            trace.metric_resets += 1
    return PerObjectiveBfgs(metrics=tuple(updated))


def verify_pareto_critical(
    problem: Problem, x: Array, tol: float, config: SolverConfig | None = None
) -> tuple[bool, SimplexWeights]:
    """Test Pareto criticality via the unscaled Euclidean dual.

    The point is critical iff some convex combination of the gradients
    vanishes; the dual solve returns the minimum-norm combination, so the
    test is ``||sum_i lam_i grad F_i(x)|| <= tol``. The certifying weights
    are returned either way.
    """
    config = config or SolverConfig()
    jac = eval_jacobian(problem, np.asarray(x, dtype=float))
    result = solve_dual(jac, Metric.identity(problem.n), config)
    return float(np.linalg.norm(result.direction)) <= tol, result.weights


def merit_w(
    jacobian: Array,
    scales: BBScales,
    metric: Metric,
    ell: float,
    config: SolverConfig | None = None,
) -> float:
    """Criticality merit value: the negated optimum of the direction
    subproblem with regularizer ``(ell/2) ||.||_B^2``.

    Zero exactly at Pareto critical points, strictly positive elsewhere.
    """
    if ell <= 0.0:
        raise ConfigError("ell must be positive")
    config = config or SolverConfig()
    scaled_metric = Metric(
        b=ell * metric.b,
        b_inv=metric.b_inv / ell,
        is_identity=metric.is_identity and ell == 1.0,
    )
    result = direction(jacobian, scales, scaled_metric, config)
    return -result.theta
