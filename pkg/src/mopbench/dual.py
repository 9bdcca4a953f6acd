"""Frank-Wolfe solver for the common dual of the direction subproblems.

All quadratic-metric direction subproblems share one dual: minimize
``phi(lam) = 0.5 * ||sum_i lam_i g_i||^2_{B^-1}`` over the unit simplex,
where the rows g_i are the (per-objective scaled) gradients. The primal
descent direction and optimal value are recovered in closed form from the
dual solution:

    d = -B^-1 (sum_i lam_i g_i),        theta = -phi(lam).

Since phi is a convex quadratic, each Frank-Wolfe step uses the exact
line-search minimizer on [0, 1] instead of the 2/(k+2) schedule; the linear
minimization oracle over the simplex is the vertex with the smallest
gradient component (ties broken by lowest index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Array,
    DimensionError,
    Metric,
    SimplexWeights,
    SolverConfig,
    SubproblemFailed,
)

__all__ = ["DualResult", "solve_dual", "check_kkt"]


@dataclass(frozen=True, eq=False)
class DualResult:
    """Solution of one direction subproblem.

    ``theta`` is the primal optimal value; strong duality ties it to the
    recovered direction by ``theta = -0.5 * ||d||_B^2``.
    """

    weights: SimplexWeights
    direction: Array
    theta: float
    fw_gap: float
    iterations: int


def solve_dual(
    scaled_gradients: Array,
    metric: Metric,
    config: SolverConfig,
    warm_start: Array | None = None,
) -> DualResult:
    """Minimize the dual objective over the simplex by Frank-Wolfe.

    Parameters
    ----------
    scaled_gradients
        (m, n) matrix whose row i is the i-th (scaled) gradient.
    metric
        The SPD pair (B, B^-1) defining the norm.
    warm_start
        Optional previous dual weights; defaults to the uniform vector.

    Raises
    ------
    SubproblemFailed
        If ``dual_max_iter`` steps do not reach the gap tolerance; the best
        weights found are attached to the exception.
    """
    grads = np.asarray(scaled_gradients, dtype=float)
    if grads.ndim != 2:
        raise DimensionError("scaled gradients must be an (m, n) matrix")
    m = grads.shape[0]
    if metric.is_identity:
        pulled = grads
    else:
        pulled = grads @ metric.b_inv  # rows are B^-1-pulled gradients
    gram = pulled @ grads.T
    gram = 0.5 * (gram + gram.T)

    if warm_start is not None and np.shape(warm_start) == (m,):
        lam = np.clip(np.asarray(warm_start, dtype=float), 0.0, None)
        total = lam.sum()
        lam = lam / total if total > 0 else np.full(m, 1.0 / m)
    else:
        lam = np.full(m, 1.0 / m)

    grad = gram @ lam
    gap = 0.0
    steps = 0
    converged = False
    eps = np.finfo(float).eps
    abs_gram = np.abs(gram)
    for _ in range(config.dual_max_iter):
        j = int(np.argmin(grad))
        lam_grad = float(lam @ grad)
        gap = lam_grad - float(grad[j])
        # Gap target relative to the current dual value, floored at the
        # rounding noise of grad = gram @ lam (its entries cancel near the
        # optimum, so the floor must use |gram| @ |lam|). This is always at
        # least as tight as dual_tol * max(1, phi(lam0)): an absolute
        # threshold lets a warm-started lam pass unchanged near criticality
        # (phi ~ 1e-12 there) and the stale direction loses the
        # descent-slope certificate.
        noise = 64.0 * eps * float(np.max(abs_gram @ np.abs(lam)))
        if gap <= max(config.dual_tol * 0.5 * lam_grad, noise):
            converged = True
            break
        # Move toward vertex e_j with the exact quadratic step on [0, 1],
        # then re-optimize exactly over the face spanned by the current
        # support (fully-corrective step). Plain FW zigzags sublinearly when
        # the optimum lies on a face of the simplex; the corrective step
        # restores finite termination on this quadratic at O(m^3) cost.
        previous = lam.copy()
        curvature = float(gram[j, j]) - 2.0 * float(grad[j]) + lam_grad
        t = 1.0 if curvature <= 0.0 else min(1.0, gap / curvature)
        lam *= 1.0 - t
        lam[j] += t
        lam = _corrective_step(lam, gram)
        if np.array_equal(lam, previous):
            # Float fixed point: no representable iterate improves phi, so
            # the residual gap is rounding noise of the gap formula itself.
            converged = True
            break
        grad = gram @ lam
        steps += 1

    lam = np.clip(lam, 0.0, None)
    lam /= lam.sum()
    result = _recover(lam, grads, pulled, gram, config, gap, steps)
    if not converged:
        raise SubproblemFailed(
            f"Frank-Wolfe gap {gap:.3e} above tolerance after {steps} steps",
            result=result,
        )
    return result


def _face_minimizer(gram_ss: Array) -> Array | None:
    """Minimizer of the quadratic over the affine hull of a support face.

    Solves the equality-constrained KKT system; None when it is too
    ill-conditioned to trust (affinely dependent gradients fall back to a
    least-squares solution first).
    """
    k = gram_ss.shape[0]
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = gram_ss
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        solution = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        solution = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    v = solution[:k]
    if not np.all(np.isfinite(v)) or abs(float(v.sum()) - 1.0) > 1e-6:
        return None
    return v


def _corrective_step(lam: Array, gram: Array) -> Array:
    """Exact minimization over the convex hull of the active atoms.

    Wolfe minor cycles: solve on the affine hull of the support; when the
    solution leaves the simplex, step to the boundary, drop the vanished
    atom and repeat. Never increases the objective.
    """
    lam = lam.copy()
    for _ in range(lam.size + 1):
        support = np.flatnonzero(lam > 0.0)
        if support.size <= 1:
            return lam
        v = _face_minimizer(gram[np.ix_(support, support)])
        if v is None:
            return lam
        if np.all(v >= 0.0):
            lam[:] = 0.0
            lam[support] = v
            return lam
        current = lam[support]
        move = v - current
        shrinking = move < 0.0
        t = float(np.min(current[shrinking] / -move[shrinking]))
        updated = np.clip(current + min(1.0, t) * move, 0.0, None)
        total = float(updated.sum())
        if total <= 0.0:
            return lam
        lam[:] = 0.0
        lam[support] = updated / total
    return lam


def _recover(lam, grads, pulled, gram, config, gap, steps) -> DualResult:
    direction = -(pulled.T @ lam)
    phi = max(0.0, float(lam @ (gram @ lam)))
    return DualResult(
        weights=SimplexWeights(lam=lam, active_tol=config.active_tol),
        direction=direction,
        theta=-0.5 * phi,
        fw_gap=gap,
        iterations=steps,
    )


def check_kkt(
    result: DualResult, scaled_gradients: Array, metric: Metric, tol: float
) -> bool:
    """Verify the KKT system of the direction subproblem at ``result``.

    Checks, all scaled by ``max(1, ||d||_B^2)``: the weights sum to one,
    stationarity ``B d + sum_i lam_i g_i = 0``, feasibility of the epigraph
    constraints ``<g_i, d> <= t`` and complementary slackness, with
    ``t = theta - 0.5 ||d||_B^2``.
    """
    grads = np.asarray(scaled_gradients, dtype=float)
    lam = result.weights.lam
    d = result.direction
    bd = d if metric.is_identity else metric.b @ d
    d_b_sq = float(d @ bd)
    t = result.theta - 0.5 * d_b_sq
    scale = max(1.0, d_b_sq)

    residuals = [abs(float(lam.sum()) - 1.0)]
    residuals.append(float(np.max(np.abs(bd + grads.T @ lam))))
    slopes = grads @ d
    residuals.append(float(np.max(slopes - t, initial=0.0)))
    residuals.append(float(np.max(np.abs(lam * (slopes - t)))))
    return max(residuals) <= tol * scale
