"""Direction-finding front ends.

``direction`` covers every quadratic-metric method by specialization of the
scaled dual: steepest descent (alpha = 1, B = I), the single variable
metric (alpha = 1, B = B_k), Barzilai-Borwein scaling (alpha = alpha_k,
B = I) and the combined variant (alpha = alpha_k, B = B_k).

``direction_newton`` handles the Newton-type subproblem whose metric
``M(lam) = sum_i lam_i B_i`` depends on the dual variables themselves. Its
dual ``psi(lam) = 0.5 ||sum_i lam_i g_i||^2_{M(lam)^-1}`` is a matrix
fractional objective, jointly convex in lam, minimized here by a
derivative bisection for two objectives and projected gradient otherwise;
this keeps the solver dependency-free for the small objective counts in
scope.
"""

from __future__ import annotations

import numpy as np

from .core import (
    Array,
    BBScales,
    Metric,
    SimplexWeights,
    SolverConfig,
    SubproblemFailed,
)
from .dual import DualResult, solve_dual

__all__ = ["direction", "direction_newton", "is_critical", "project_simplex"]

_COND_LIMIT = 1e14


def direction(
    jacobian: Array,
    scales: BBScales,
    metric: Metric,
    config: SolverConfig,
    warm_start: Array | None = None,
) -> DualResult:
    """Scale the gradient rows by 1/alpha_i and solve the common dual."""
    scaled = np.asarray(jacobian, dtype=float) / scales.alpha[:, None]
    return solve_dual(scaled, metric, config, warm_start=warm_start)


def is_critical(result: DualResult, tol: float) -> bool:
    """Stopping predicate: Euclidean norm of the direction at most ``tol``."""
    return float(np.linalg.norm(result.direction)) <= tol


def project_simplex(v: Array) -> Array:
    """Euclidean projection onto the unit simplex (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u) - 1.0
    indices = np.arange(1, v.size + 1)
    rho = np.max(indices[u - cumulative / indices > 0.0])
    theta = cumulative[rho - 1] / rho
    return np.clip(v - theta, 0.0, None)


class _NewtonDual:
    """Evaluate psi(lam) and its pieces for M(lam) = sum lam_i B_i."""

    def __init__(self, jacobian: Array, matrices: list[Array]):
        self.jacobian = np.asarray(jacobian, dtype=float)
        self.stack = np.stack([np.asarray(b, dtype=float) for b in matrices])

    def solve(self, lam: Array) -> tuple[float, Array, Array]:
        """Return (psi, d, g_lam); raises SubproblemFailed near singularity."""
        m_lam = np.tensordot(lam, self.stack, axes=1)
        g_lam = self.jacobian.T @ lam
        try:
            chol = np.linalg.cholesky(m_lam)
        except np.linalg.LinAlgError as exc:
            raise SubproblemFailed(f"aggregated metric not SPD: {exc}") from exc
        diag = np.diag(chol)
        if (diag.max() / diag.min()) ** 2 > _COND_LIMIT:
            raise SubproblemFailed(
                "aggregated metric condition estimate exceeds 1e14"
            )
        u = np.linalg.solve(chol.T, np.linalg.solve(chol, g_lam))
        return 0.5 * float(g_lam @ u), -u, g_lam

    def gradient(self, lam: Array, d: Array) -> Array:
        """d psi / d lam_i = -<g_i, d> - 0.5 ||d||^2_{B_i}."""
        quad = np.einsum("i,mij,j->m", d, self.stack, d)
        return -(self.jacobian @ d) - 0.5 * quad


def _result_from(lam, psi_value, d, config, gap, iterations) -> DualResult:
    return DualResult(
        weights=SimplexWeights(lam=lam, active_tol=config.active_tol),
        direction=d,
        theta=-psi_value,
        fw_gap=gap,
        iterations=iterations,
    )


def direction_newton(
    jacobian: Array,
    hessians_or_approximations: list[Array],
    config: SolverConfig,
) -> DualResult:
    """Solve the Newton-type direction subproblem over the simplex.

    Reports ``theta = -0.5 ||d||^2_{M(lam)}``, consistent with the other
    direction subproblems by duality of the fixed-lam inner problem.
    """
    dual = _NewtonDual(jacobian, hessians_or_approximations)
    m = dual.jacobian.shape[0]

    if m == 1:
        psi, d, _ = dual.solve(np.ones(1))
        return _result_from(np.ones(1), psi, d, config, 0.0, 0)
    if m == 2:
        return _newton_bisect(dual, config)
    return _newton_projected_gradient(dual, config)


def _newton_bisect(dual: _NewtonDual, config: SolverConfig) -> DualResult:
    """One-dimensional search over lam = (1-u, u), u in [0, 1].

    psi is convex and its derivative is available in closed form, so the
    minimizer is located by bisection on the derivative sign down to the
    float limit. A fixed-width golden-section stop leaves lam stale near
    criticality, where the slope certificates need lam at full precision.
    """

    def slope_at(u: float) -> tuple[float, float, Array]:
        lam = np.array([1.0 - u, u])
        psi, d, _ = dual.solve(lam)
        grad = dual.gradient(lam, d)
        return float(grad[1] - grad[0]), psi, d

    lo, hi = 0.0, 1.0
    slope_lo, psi_lo, _ = slope_at(lo)
    slope_hi, psi_hi, _ = slope_at(hi)
    iterations = 2
    if slope_lo >= 0.0:
        u = 0.0
    elif slope_hi <= 0.0:
        u = 1.0
    else:
        while hi - lo > 4.0 * np.finfo(float).eps and iterations < config.dual_max_iter:
            mid = 0.5 * (lo + hi)
            slope_mid, _, _ = slope_at(mid)
            if slope_mid < 0.0:
                lo = mid
            else:
                hi = mid
            iterations += 1
        u = 0.5 * (lo + hi)
    lam = np.array([1.0 - u, u])
    psi, d, _ = dual.solve(lam)
    return _result_from(lam, psi, d, config, hi - lo, iterations)


def _newton_projected_gradient(dual: _NewtonDual, config: SolverConfig) -> DualResult:
    """Projected gradient with diminishing steps scaled by a curvature probe."""
    m = dual.jacobian.shape[0]
    lam = np.full(m, 1.0 / m)
    psi, d, _ = dual.solve(lam)
    grad = dual.gradient(lam, d)
    threshold = config.dual_tol * max(1.0, psi)

    # Secant estimate of the gradient's Lipschitz constant near lam0.
    probe = project_simplex(lam - grad / max(1.0, float(np.linalg.norm(grad))))
    probe_gap = float(np.linalg.norm(probe - lam))
    if probe_gap > 1e-12:
        psi_p, d_p, _ = dual.solve(probe)
        lipschitz = float(np.linalg.norm(dual.gradient(probe, d_p) - grad)) / probe_gap
    else:
        lipschitz = 1.0
    step0 = 1.0 / max(lipschitz, 1e-12)

    iterations = 0
    residual = np.inf
    for j in range(config.dual_max_iter):
        residual = float(np.linalg.norm(lam - project_simplex(lam - grad)))
        if residual <= threshold:
            break
        lam = project_simplex(lam - (step0 / (j + 1.0)) * grad)
        psi, d, _ = dual.solve(lam)
        grad = dual.gradient(lam, d)
        iterations += 1
    return _result_from(lam, psi, d, config, residual, iterations)
