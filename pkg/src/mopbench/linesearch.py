"""Vector-valued Armijo backtracking.

The accepted step is the largest t in {1, gamma, gamma^2, ...} satisfying
the componentwise sufficient-decrease condition

    F(x + t d) - F(x) <= t * sigma * JF(x) d.

Function-evaluation accounting: every trial point costs one full evaluation
of the m-vector F, the accepted trial included; gradient evaluations never
enter this count (they are tallied separately by the driver).
"""

from __future__ import annotations

import numpy as np

from .core import Array, LineSearchFailed, NotDescentDirection, SolverConfig
from .problems import Problem, eval_objectives

__all__ = ["armijo"]


def armijo(
    problem: Problem,
    x: Array,
    f_x: Array,
    d: Array,
    slopes: Array,
    config: SolverConfig,
) -> tuple[float, int, Array]:
    """Backtrack along the descent direction ``d``.

    ``slopes`` must hold the directional derivatives ``<grad F_i(x), d>``,
    all strictly negative. Returns ``(t, fevals, F(x + t d))``.

    Raises
    ------
    NotDescentDirection
        If some slope is nonnegative.
    LineSearchFailed
        After ``max_backtracks`` rejected trials; the exception carries the
        least-violating step seen and the evaluation count.
    """
    slopes = np.asarray(slopes, dtype=float)
    if np.any(slopes >= 0.0):
        raise NotDescentDirection(
            f"slopes must all be negative, got max {slopes.max():.3e}"
        )
    rhs = config.sigma * slopes
    fevals = 0
    best_t = 1.0
    best_violation = np.inf
    for j in range(config.max_backtracks + 1):
        t = config.gamma**j
        f_trial = eval_objectives(problem, x + t * d)
        fevals += 1
        violation = float(np.max(f_trial - f_x - t * rhs))
        if violation <= 0.0:
            return t, fevals, f_trial
        if violation < best_violation:
            best_violation = violation
            best_t = t
    raise LineSearchFailed(
        f"no acceptable step within {config.max_backtracks} backtracks "
        f"(best violation {best_violation:.3e} at t={best_t:.3e})",
        best_t=best_t,
        fevals=fevals,
    )
