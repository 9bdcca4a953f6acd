"""Variable trade-off metric maintenance.

The trade-off metric approximates the Hessian of the aggregated objective
``F_w = sum_i w_i F_i`` with weights ``w = lam/alpha`` taken from the
previous direction subproblem. Both the matrix and its inverse are kept
explicitly and updated jointly by the BFGS pair formulas, so the dual solve
never needs a factorization; each update symmetrizes both matrices to
suppress drift and verifies that the pair still multiplies to the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import (
    Array,
    BBScales,
    DimensionError,
    Metric,
    MetricBreakdown,
    SimplexWeights,
)

__all__ = [
    "aggregate_gradient",
    "bfgs_update",
    "TradeoffState",
    "update_tradeoff",
    "PerObjectiveBfgs",
]

CURVATURE_RTOL = 1e-12
PAIR_BREAKDOWN_TOL = 1e-6  # times n


def aggregate_gradient(
    jacobian: Array, weights: SimplexWeights, scales: BBScales
) -> Array:
    """The gradient of ``sum_i (lam_i / alpha_i) F_i``."""
    jacobian = np.asarray(jacobian, dtype=float)
    if jacobian.ndim != 2 or jacobian.shape[0] != weights.lam.shape[0]:
        raise DimensionError("jacobian rows must match the number of weights")
    if scales.alpha.shape != weights.lam.shape:
        raise DimensionError("scales and weights must have equal length")
    return jacobian.T @ (weights.lam / scales.alpha)


def bfgs_update(metric: Metric, s: Array, y: Array) -> Metric:
    """Joint BFGS update of (B, B^-1) with the pair (s, y).

    The update is applied only when ``<s, y> > 1e-12 ||s|| ||y||``; otherwise
    both matrices are returned unchanged, preserving positive definiteness.
    After an accepted update the secant equation ``B' s = y`` holds and the
    pair product is re-verified.

    Raises
    ------
    MetricBreakdown
        If ``max|B' B'^-1 - I|`` exceeds ``1e-6 n``; the caller is expected
        to reset the metric to the identity.
    """
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    sy = float(s @ y)
    if sy <= CURVATURE_RTOL * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
        return metric

    b = metric.b
    bs = b @ s
    sbs = float(s @ bs)
    if sbs <= 0.0:
        raise MetricBreakdown("metric lost positive definiteness along s")
    b_new = b - np.outer(bs, bs) / sbs + np.outer(y, y) / sy
    b_new = 0.5 * (b_new + b_new.T)

    # Inverse update in expanded form: H' = H + ((sy + y^T H y)/sy^2) s s^T
    #                                      - (H y s^T + s y^T H)/sy
    h = metric.b_inv
    hy = h @ y
    yhy = float(y @ hy)
    h_new = (
        h
        + ((sy + yhy) / sy**2) * np.outer(s, s)
        - (np.outer(hy, s) + np.outer(s, hy)) / sy
    )
    h_new = 0.5 * (h_new + h_new.T)

    n = b_new.shape[0]
    pair_error = float(np.max(np.abs(b_new @ h_new - np.eye(n))))
    if pair_error > PAIR_BREAKDOWN_TOL * n:
        raise MetricBreakdown(
            f"pair inconsistency {pair_error:.3e} exceeds {PAIR_BREAKDOWN_TOL * n:.3e}"
        )
    return Metric(b=b_new, b_inv=h_new)


@dataclass(frozen=True, eq=False)
class TradeoffState:
    """Metric plus the cached quantities needed to form the next y-vector.

    ``prev_agg_gradient`` is the aggregated gradient under
    ``prev_weights/prev_scales`` evaluated at ``prev_point``; forming the
    BFGS y-vector requires re-aggregating the new Jacobian with these same
    weights.
    """

    metric: Metric
    prev_weights: SimplexWeights
    prev_scales: BBScales
    prev_agg_gradient: Array
    prev_point: Array

    def recache(
        self,
        weights: SimplexWeights,
        scales: BBScales,
        jacobian: Array,
        point: Array,
    ) -> "TradeoffState":
        """Overwrite the cached weights after a dual solve has produced new ones."""
        return TradeoffState(
            metric=self.metric,
            prev_weights=weights,
            prev_scales=scales,
            prev_agg_gradient=aggregate_gradient(jacobian, weights, scales),
            prev_point=np.asarray(point, dtype=float),
        )


def update_tradeoff(
    state: TradeoffState, x_new: Array, jacobian_new: Array
) -> TradeoffState:
    """BFGS-update the trade-off metric across the step to ``x_new``.

    The y-vector uses the cached weights at both endpoints:
    ``y = grad F_w(x_new) - grad F_w(x_prev)`` with ``w`` frozen at
    ``prev_weights/prev_scales``. The caller overwrites the cache afterwards
    via :meth:`TradeoffState.recache`. Raises :class:`MetricBreakdown` when
    the pair update does.
    """
    y = (
        aggregate_gradient(jacobian_new, state.prev_weights, state.prev_scales)
        - state.prev_agg_gradient
    )
    s = np.asarray(x_new, dtype=float) - state.prev_point
    return replace(state, metric=bfgs_update(state.metric, s, y))


@dataclass(frozen=True, eq=False)
class PerObjectiveBfgs:
    """One BFGS metric per objective, for the quasi-Newton baseline."""

    metrics: tuple[Metric, ...]

    @classmethod
    def identity(cls, m: int, n: int) -> "PerObjectiveBfgs":
        return cls(metrics=tuple(Metric.identity(n) for _ in range(m)))

    def matrices(self) -> list[Array]:
        return [metric.b for metric in self.metrics]
