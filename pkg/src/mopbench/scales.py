"""Per-objective Barzilai-Borwein scales relative to a metric.

Given the step ``s = x_k - x_{k-1}`` and the per-objective gradient
differences ``y_i``, the scale for objective i is the secant-equation
estimate measured in the metric norm:

    <s, y_i> > 0:   alpha_i = <s, y_i> / ||s||_B^2
    <s, y_i> < 0:   alpha_i = ||y_i|| / ||B s||
    <s, y_i> = 0:   alpha_i = alpha_min

clamped to [alpha_min, alpha_max] in the first two branches. The Euclidean
variant is the B = I special case. The zero branch fires on the relative
test ``|<s, y_i>| <= 1e-14 ||s|| ||y_i||`` since floating-point inner
products are almost never exactly zero.
"""

from __future__ import annotations

import numpy as np

from .core import Array, BBScales, ConfigError, DimensionError, Metric

__all__ = ["compute_alpha", "compute_alpha_euclidean"]

_ZERO_CURVATURE_RTOL = 1e-14


def _alphas(
    s_prev: Array,
    y_prev: Array,
    s_b_sq: float,
    bs_norm: float,
    alpha_min: float,
    alpha_max: float,
) -> BBScales:
    s_norm = float(np.linalg.norm(s_prev))
    if s_norm == 0.0:
        raise ConfigError("BB scales are undefined at a stationary pair (s = 0)")
    sy = y_prev @ s_prev  # (m,)
    y_norms = np.linalg.norm(y_prev, axis=1)
    zero = np.abs(sy) <= _ZERO_CURVATURE_RTOL * s_norm * y_norms

    with np.errstate(divide="ignore", invalid="ignore"):
        positive = np.clip(sy / s_b_sq, alpha_min, alpha_max)
        negative = np.clip(y_norms / bs_norm, alpha_min, alpha_max)
    alpha = np.where(sy > 0.0, positive, negative)
    alpha[zero] = alpha_min
    return BBScales(alpha=alpha)


def compute_alpha(
    s_prev: Array,
    y_prev: Array,
    metric: Metric,
    alpha_min: float,
    alpha_max: float,
) -> BBScales:
    """Scales relative to ``||.||_B``; ``y_prev`` rows are gradient diffs."""
    s_prev = np.asarray(s_prev, dtype=float)
    y_prev = np.asarray(y_prev, dtype=float)
    if y_prev.ndim != 2 or y_prev.shape[1] != s_prev.shape[0]:
        raise DimensionError("y_prev must be (m, n) with n matching s_prev")
    bs = s_prev if metric.is_identity else metric.b @ s_prev
    return _alphas(
        s_prev,
        y_prev,
        s_b_sq=float(s_prev @ bs),
        bs_norm=float(np.linalg.norm(bs)),
        alpha_min=alpha_min,
        alpha_max=alpha_max,
    )


def compute_alpha_euclidean(
    s_prev: Array, y_prev: Array, alpha_min: float, alpha_max: float
) -> BBScales:
    """The B = I special case."""
    s_prev = np.asarray(s_prev, dtype=float)
    y_prev = np.asarray(y_prev, dtype=float)
    if y_prev.ndim != 2 or y_prev.shape[1] != s_prev.shape[0]:
        raise DimensionError("y_prev must be (m, n) with n matching s_prev")
    return _alphas(
        s_prev,
        y_prev,
        s_b_sq=float(s_prev @ s_prev),
        bs_norm=float(np.linalg.norm(s_prev)),
        alpha_min=alpha_min,
        alpha_max=alpha_max,
    )
