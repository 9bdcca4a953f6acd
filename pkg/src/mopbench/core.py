"""Shared numeric types, solver configuration and validity predicates.

Everything in this module is an immutable value type: instances are safe to
share read-only across threads once constructed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

Array = np.ndarray


class MopError(Exception):
    """Base class for all library errors."""


class DimensionError(MopError):
    """Array shapes are inconsistent with the owning problem."""


class ConfigError(MopError):
    """Invalid configuration or problem construction parameters."""


class NotDescentDirection(MopError):
    """A line search was requested along a direction with a nonnegative slope."""


class LineSearchFailed(MopError):
    """Backtracking exhausted ``max_backtracks`` without acceptance."""

    def __init__(self, message: str, best_t: float, fevals: int):
        super().__init__(message)
        self.best_t = best_t
        self.fevals = fevals


class SubproblemFailed(MopError):
    """A direction subproblem did not reach its tolerance.

    ``result`` carries the best iterate found so the caller can inspect it.
    """

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class MetricBreakdown(MopError):
    """The maintained (B, B^-1) pair lost consistency beyond repair."""


class Status(Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    LINE_SEARCH_FAILURE = "LineSearchFailure"
    SUBPROBLEM_FAILURE = "SubproblemFailure"


def check_spd(matrix: Array, tol: float) -> bool:
    """Test whether ``matrix`` is symmetric positive definite.

    True iff the matrix is symmetric within ``tol`` and all pivots of a
    symmetric factorization (here: the eigenvalues of the symmetrized
    matrix) exceed ``tol``.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        return False
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - a.T))) > tol * scale:
        return False
    pivots = np.linalg.eigvalsh(0.5 * (a + a.T))
    return bool(pivots.min() > tol)


@dataclass(frozen=True, eq=False)
class Metric:
    """An SPD matrix paired with its maintained inverse.

    The two matrices are updated jointly (see :func:`mopbench.metrics.bfgs_update`);
    ``pair_error`` measures their drift from exact mutual inversion.
    """

    b: Array
    b_inv: Array
    is_identity: bool = False

    @classmethod
    def identity(cls, n: int) -> "Metric":
        eye = np.eye(n)
        return cls(b=eye, b_inv=eye.copy(), is_identity=True)

    @classmethod
    def from_matrix(cls, b: Array) -> "Metric":
        """Build a metric from an SPD matrix, inverting it via Cholesky."""
        b = np.asarray(b, dtype=float)
        if not check_spd(b, 1e-12):
            raise ConfigError("metric matrix must be symmetric positive definite")
        chol = np.linalg.cholesky(b)
        inv_chol = np.linalg.inv(chol)
        b_inv = inv_chol.T @ inv_chol
        return cls(b=b, b_inv=0.5 * (b_inv + b_inv.T))

    @property
    def n(self) -> int:
        return self.b.shape[0]

    def pair_error(self) -> float:
        """Max-entry norm of ``b @ b_inv - I``."""
        return float(np.max(np.abs(self.b @ self.b_inv - np.eye(self.n))))

    def norm(self, v: Array) -> float:
        """The induced norm ``sqrt(<v, B v>)``."""
        return float(np.sqrt(max(0.0, float(v @ (self.b @ v)))))

    def eig_bounds(self) -> tuple[float, float]:
        """Smallest and largest eigenvalue of ``b`` (diagnostic only)."""
        vals = np.linalg.eigvalsh(self.b)
        return float(vals[0]), float(vals[-1])


PAIR_CONSISTENCY_TOL = 1e-8  # per-n factor applied where used


@dataclass(frozen=True, eq=False)
class SimplexWeights:
    """Dual weights on the unit simplex with an active-set accessor."""

    lam: Array
    active_tol: float = 1e-8

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        object.__setattr__(self, "lam", lam)
        if lam.ndim != 1:
            raise DimensionError("weights must be a vector")
        if not np.all(np.isfinite(lam)) or np.any(lam < 0):
            raise ConfigError("weights must be finite and nonnegative")
        if abs(float(lam.sum()) - 1.0) > 1e-10:
            raise ConfigError(f"weights must sum to 1, got {lam.sum()!r}")

    def active_set(self) -> Array:
        """Indices with weight above ``active_tol``; never empty."""
        active = np.flatnonzero(self.lam > self.active_tol)
        if active.size == 0:
            active = np.array([int(np.argmax(self.lam))])
        return active


@dataclass(frozen=True, eq=False)
class BBScales:
    """Per-objective Barzilai-Borwein scales, already clamped to bounds."""

    alpha: Array

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        object.__setattr__(self, "alpha", alpha)
        if not np.all(np.isfinite(alpha)) or np.any(alpha <= 0):
            raise ConfigError("scales must be finite and positive")

    @classmethod
    def ones(cls, m: int) -> "BBScales":
        return cls(alpha=np.ones(m))


@dataclass(frozen=True)
class SolverConfig:
    """Solver parameters.

    Defaults mirror the benchmark protocol: ``sigma=1e-4``, ``gamma=0.5``,
    scale truncation at ``[1e-3, 1e3]``, stopping at ``||d|| <= 1e-6`` and at
    most 500 iterations. The remaining knobs are artifact choices: the inner
    dual tolerance must exceed the outer tolerance, and 60 halvings already
    reach steps around 1e-18.
    """

    sigma: float = 1e-4
    gamma: float = 0.5
    alpha_min: float = 1e-3
    alpha_max: float = 1e3
    tol: float = 1e-6
    max_iter: int = 500
    dual_tol: float = 1e-10
    dual_max_iter: int = 10000
    active_tol: float = 1e-8
    warmstart_eps: float = 1e-4
    max_backtracks: int = 60

    def __post_init__(self):
        if not (0.0 < self.sigma < 1.0):
            raise ConfigError("sigma must lie in (0, 1)")
        if not (0.0 < self.gamma < 1.0):
            raise ConfigError("gamma must lie in (0, 1)")
        if not (0.0 < self.alpha_min < self.alpha_max):
            raise ConfigError("require 0 < alpha_min < alpha_max")
        if self.tol <= 0.0:
            raise ConfigError("tol must be positive")
        if self.max_iter < 1 or self.dual_max_iter < 1 or self.max_backtracks < 1:
            raise ConfigError("iteration limits must be positive")
        if self.dual_tol <= 0.0 or self.active_tol <= 0.0 or self.warmstart_eps <= 0.0:
            raise ConfigError("tolerances must be positive")


@dataclass(frozen=True, eq=False)
class IterationRecord:
    """One accepted outer iteration.

    ``point``, ``values`` and ``direction`` are the pre-step quantities;
    ``fevals`` is the cumulative count of full objective-vector evaluations
    performed by line searches up to and including this iteration.
    """

    point: Array
    values: Array
    direction: Array
    dir_norm: float
    dir_norm_b: float
    step: float
    fevals: int
    weights: SimplexWeights
    scales: BBScales
    theta: float


@dataclass(eq=False)
class SolveTrace:
    """Full record of one solver run."""

    records: list[IterationRecord] = field(default_factory=list)
    status: Status = Status.MAX_ITERATIONS
    final_point: Array | None = None
    final_values: Array | None = None
    wall_time: float = 0.0
    gradient_evals: int = 0
    metric_resets: int = 0
    message: str = ""

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def fevals(self) -> int:
        return self.records[-1].fevals if self.records else 0
