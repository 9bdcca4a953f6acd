"""Test problems: analytic benchmarks, the random ill-conditioned quadratic
family, initial-point sampling and a user-extensible registry.

Built-in analytic problems
--------------------------
BK1      n=2,  m=2,  box [-5, 10]^2
         F1 = x1^2 + x2^2,  F2 = (x1-5)^2 + (x2-5)^2
JOS1a    n=50,  m=2, box [-2, 2]^n
JOS1b    n=100, m=2, box [-2, 2]^n
JOS1c    n=100, m=2, box [-50, 50]^n
JOS1d    n=100, m=2, box [-100, 100]^n
         F1 = (1/n) sum x_i^2,  F2 = (1/n) sum (x_i - 2)^2

Both families are exactly quadratic (Hessians 2I resp. (2/n)I), which makes
them convenient correctness anchors for quasi-Newton style solvers.

The quadratic family QPa..QPg pairs two random positive definite quadratics
``F_i(x) = 0.5 <x, A_i x> + <b_i, x>`` whose condition numbers are prescribed
per objective; instances are registered as seeded templates so a benchmark
invocation can realize them deterministically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Array, ConfigError, DimensionError

__all__ = [
    "Problem",
    "QuadraticProblem",
    "QuadraticSpec",
    "QP_FAMILY",
    "ProblemRegistry",
    "DuplicateProblem",
    "UnknownProblem",
    "eval_objectives",
    "eval_jacobian",
    "eval_hessians",
    "make_quadratic",
    "sample_initial",
    "fd_jacobian",
    "bk1",
    "jos1",
    "register_problem",
    "default_registry",
    "save_problem",
    "load_problem",
]


@dataclass(frozen=True, eq=False)
class Problem:
    """An m-objective problem over R^n with gradient access.

    ``objectives`` maps a length-n vector to the m objective values,
    ``jacobian`` to the (m, n) matrix whose row i is grad F_i, and the
    optional ``hessians`` to an (m, n, n) stack. Evaluators must be
    deterministic, side-effect free and re-entrant.
    """

    name: str
    n: int
    m: int
    lower: Array
    upper: Array
    objectives: Callable[[Array], Array]
    jacobian: Callable[[Array], Array]
    hessians: Callable[[Array], Array] | None = None

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != (self.n,) or upper.shape != (self.n,):
            raise DimensionError("bounds must be vectors of length n")
        if np.any(lower > upper):
            raise ConfigError("lower bounds must not exceed upper bounds")


@dataclass(frozen=True, eq=False)
class QuadraticProblem(Problem):
    """A quadratic problem carrying its defining data for serialization."""

    a: Array | None = None  # (m, n, n)
    b: Array | None = None  # (m, n)


def eval_objectives(problem: Problem, x: Array) -> Array:
    """Evaluate F(x) with shape validation. Does no evaluation accounting."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise DimensionError(f"point has shape {x.shape}, expected ({problem.n},)")
    values = np.asarray(problem.objectives(x), dtype=float)
    if values.shape != (problem.m,):
        raise DimensionError(
            f"objectives returned shape {values.shape}, expected ({problem.m},)"
        )
    return values


def eval_jacobian(problem: Problem, x: Array) -> Array:
    """Evaluate JF(x); row i is grad F_i(x)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise DimensionError(f"point has shape {x.shape}, expected ({problem.n},)")
    jac = np.asarray(problem.jacobian(x), dtype=float)
    if jac.shape != (problem.m, problem.n):
        raise DimensionError(
            f"jacobian returned shape {jac.shape}, expected ({problem.m}, {problem.n})"
        )
    return jac


def eval_hessians(problem: Problem, x: Array) -> Array:
    """Evaluate the (m, n, n) Hessian stack; requires Hessian access."""
    if problem.hessians is None:
        raise ConfigError(f"problem {problem.name!r} has no Hessian evaluator")
    hess = np.asarray(problem.hessians(np.asarray(x, dtype=float)), dtype=float)
    if hess.shape != (problem.m, problem.n, problem.n):
        raise DimensionError("hessians returned an inconsistent shape")
    return hess


# ---------------------------------------------------------------------------
# Built-in analytic problems


def _bk1_objectives(x: Array) -> Array:
    return np.array(
        [x[0] ** 2 + x[1] ** 2, (x[0] - 5.0) ** 2 + (x[1] - 5.0) ** 2]
    )


def _bk1_jacobian(x: Array) -> Array:
    return np.array([[2.0 * x[0], 2.0 * x[1]], [2.0 * (x[0] - 5.0), 2.0 * (x[1] - 5.0)]])


def _bk1_hessians(x: Array) -> Array:
    return np.stack([2.0 * np.eye(2), 2.0 * np.eye(2)])


def bk1() -> Problem:
    return Problem(
        name="BK1",
        n=2,
        m=2,
        lower=np.full(2, -5.0),
        upper=np.full(2, 10.0),
        objectives=_bk1_objectives,
        jacobian=_bk1_jacobian,
        hessians=_bk1_hessians,
    )


class _Jos1:
    """JOS1 evaluators for a given dimension (picklable, re-entrant)."""

    def __init__(self, n: int):
        self.n = n

    def objectives(self, x: Array) -> Array:
        return np.array(
            [float(x @ x) / self.n, float((x - 2.0) @ (x - 2.0)) / self.n]
        )

    def jacobian(self, x: Array) -> Array:
        return np.vstack([2.0 * x / self.n, 2.0 * (x - 2.0) / self.n])

    def hessians(self, x: Array) -> Array:
        h = (2.0 / self.n) * np.eye(self.n)
        return np.stack([h, h])


def jos1(name: str, n: int, box: float) -> Problem:
    ev = _Jos1(n)
    return Problem(
        name=name,
        n=n,
        m=2,
        lower=np.full(n, -box),
        upper=np.full(n, box),
        objectives=ev.objectives,
        jacobian=ev.jacobian,
        hessians=ev.hessians,
    )


# ---------------------------------------------------------------------------
# Random ill-conditioned quadratics


@dataclass(frozen=True)
class QuadraticSpec:
    """Generator parameters for one random quadratic instance.

    ``kappa[i]`` prescribes the condition number of the i-th Hessian;
    ``linear_scale`` bounds the entries of the linear terms b_i.
    """

    n: int
    kappa: tuple[float, ...]
    seed: int
    linear_scale: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("quadratic problems need n >= 2")
        if len(self.kappa) < 1 or any(k < 1.0 for k in self.kappa):
            raise ConfigError("condition numbers must satisfy kappa_i >= 1")
        if self.linear_scale <= 0.0:
            raise ConfigError("linear_scale must be positive")


class _QuadraticEvaluators:
    def __init__(self, a: Array, b: Array):
        self.a = a
        self.b = b

    def objectives(self, x: Array) -> Array:
        ax = self.a @ x  # (m, n)
        return 0.5 * (ax @ x) + self.b @ x

    def jacobian(self, x: Array) -> Array:
        return self.a @ x + self.b

    def hessians(self, x: Array) -> Array:
        return self.a


def _random_orthogonal(rng: np.random.Generator, n: int) -> Array:
    """Orthogonal factor of a Gaussian sample, sign-normalized so the QR
    triangle has a positive diagonal (Haar-distributed)."""
    gauss = rng.standard_normal((n, n))
    q, r = np.linalg.qr(gauss)
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    return q * signs


def _spectrum(rng: np.random.Generator, n: int, kappa: float) -> Array:
    """Log-uniform eigenvalues on [1, kappa] with the endpoints pinned."""
    d = np.exp(rng.uniform(0.0, np.log(kappa), size=n))
    d[int(np.argmin(d))] = 1.0
    d[int(np.argmax(d))] = kappa
    return d


def make_quadratic(
    spec: QuadraticSpec,
    name: str | None = None,
    lower: Array | None = None,
    upper: Array | None = None,
) -> QuadraticProblem:
    """Realize a random quadratic instance, deterministic in ``spec.seed``.

    Each Hessian is A_i = H_i D_i H_i^T with H_i a random orthogonal matrix
    and D_i the pinned log-uniform spectrum, so cond(A_i) = kappa_i exactly.
    The default sampling box is [-n, n]^n, matching the benchmark family.
    """
    rng = np.random.default_rng(spec.seed)
    m = len(spec.kappa)
    n = spec.n
    a = np.empty((m, n, n))
    b = np.empty((m, n))
    for i, kappa in enumerate(spec.kappa):
        h = _random_orthogonal(rng, n)
        d = _spectrum(rng, n, kappa)
        a_i = (h * d) @ h.T
        a[i] = 0.5 * (a_i + a_i.T)
        b_i = rng.uniform(-spec.linear_scale, spec.linear_scale, size=n)
        while np.max(np.abs(b_i)) < 1e-12:
            b_i = rng.uniform(-spec.linear_scale, spec.linear_scale, size=n)
        b[i] = b_i
    ev = _QuadraticEvaluators(a, b)
    return QuadraticProblem(
        name=name or f"QP(n={n},kappa={spec.kappa},seed={spec.seed})",
        n=n,
        m=m,
        lower=np.full(n, -float(n)) if lower is None else np.asarray(lower, float),
        upper=np.full(n, float(n)) if upper is None else np.asarray(upper, float),
        objectives=ev.objectives,
        jacobian=ev.jacobian,
        hessians=ev.hessians,
        a=a,
        b=b,
    )


# (name, n, (kappa_1, kappa_2), box half-width) -- box equals n throughout.
QP_FAMILY: tuple[tuple[str, int, tuple[float, float], float], ...] = (
    ("QPa", 10, (1e1, 1e1), 10.0),
    ("QPb", 10, (1e2, 1e2), 10.0),
    ("QPc", 100, (1e2, 1e2), 100.0),
    ("QPd", 100, (1e3, 1e3), 100.0),
    ("QPe", 500, (1e3, 1e3), 500.0),
    ("QPf", 500, (1e4, 1e4), 500.0),
    ("QPg", 100, (1e5, 1e2), 100.0),
)


# ---------------------------------------------------------------------------
# Sampling and derivative checking


def sample_initial(problem: Problem, rng_seed: int) -> Array:
    """Sample a starting point uniformly from the problem's box."""
    if not (np.all(np.isfinite(problem.lower)) and np.all(np.isfinite(problem.upper))):
        raise ConfigError(f"problem {problem.name!r} has unbounded sampling box")
    rng = np.random.default_rng(rng_seed)
    return rng.uniform(problem.lower, problem.upper)


def fd_jacobian(
    problem: Problem, x: Array, h: float = 1e-6, relative_step: bool = False
) -> Array:
    """Central-difference Jacobian, the independent oracle for gradients.

    With ``relative_step`` the per-coordinate step is ``h * max(1, |x_j|)``,
    which keeps the difference quotient well conditioned on boxes whose
    coordinates reach hundreds.
    """
    x = np.asarray(x, dtype=float)
    jac = np.empty((problem.m, problem.n))
    for j in range(problem.n):
        step = h * max(1.0, abs(x[j])) if relative_step else h
        e = np.zeros(problem.n)
        e[j] = step
        jac[:, j] = (eval_objectives(problem, x + e) - eval_objectives(problem, x - e)) / (
            2.0 * step
        )
    return jac


# ---------------------------------------------------------------------------
# Registry


class DuplicateProblem(ConfigError):
    pass


class UnknownProblem(ConfigError):
    pass


class ProblemRegistry:
    """Name -> problem mapping with seeded templates for generated families.

    Concrete problems resolve to themselves; templates (the QP family) are
    callables realizing an instance from a seed, so one benchmark invocation
    can share a single instance across methods and runs.
    """

    def __init__(self):
        self._problems: dict[str, Problem] = {}
        self._templates: dict[str, Callable[[int], Problem]] = {}

    def register(self, problem: Problem) -> None:
        if problem.name in self._problems or problem.name in self._templates:
            raise DuplicateProblem(f"problem {problem.name!r} already registered")
        self._problems[problem.name] = problem

    def register_template(self, name: str, factory: Callable[[int], Problem]) -> None:
        if name in self._problems or name in self._templates:
            raise DuplicateProblem(f"problem {name!r} already registered")
        self._templates[name] = factory

    def names(self) -> list[str]:
        return sorted([*self._problems, *self._templates])

    def is_template(self, name: str) -> bool:
        return name in self._templates

    def resolve(self, name: str, instance_seed: int = 0) -> Problem:
        if name in self._problems:
            return self._problems[name]
        if name in self._templates:
            return self._templates[name](instance_seed)
        raise UnknownProblem(f"no problem named {name!r} in the registry")


def register_problem(registry: ProblemRegistry, problem: Problem) -> None:
    registry.register(problem)


class _QpTemplate:
    def __init__(self, name: str, n: int, kappa: tuple[float, float], box: float):
        self.name = name
        self.n = n
        self.kappa = kappa
        self.box = box

    def __call__(self, seed: int) -> QuadraticProblem:
        return make_quadratic(
            QuadraticSpec(n=self.n, kappa=self.kappa, seed=seed),
            name=self.name,
            lower=np.full(self.n, -self.box),
            upper=np.full(self.n, self.box),
        )


def default_registry() -> ProblemRegistry:
    """Registry preloaded with the built-in roster."""
    registry = ProblemRegistry()
    registry.register(bk1())
    registry.register(jos1("JOS1a", 50, 2.0))
    registry.register(jos1("JOS1b", 100, 2.0))
    registry.register(jos1("JOS1c", 100, 50.0))
    registry.register(jos1("JOS1d", 100, 100.0))
    for name, n, kappa, box in QP_FAMILY:
        registry.register_template(name, _QpTemplate(name, n, kappa, box))
    return registry


# ---------------------------------------------------------------------------
# Problem-definition files (used to freeze generated instances)


def save_problem(problem: QuadraticProblem, path) -> None:
    """Write a quadratic problem definition as one JSON document.

    The Hessians are stored row-major; floats round-trip exactly through the
    shortest-repr decimal text JSON emits.
    """
    if not isinstance(problem, QuadraticProblem) or problem.a is None:
        raise ConfigError("only quadratic problems carry serializable data")
    doc = {
        "name": problem.name,
        "n": problem.n,
        "m": problem.m,
        "lower": problem.lower.tolist(),
        "upper": problem.upper.tolist(),
        "a": [a_i.reshape(-1).tolist() for a_i in problem.a],
        "b": [b_i.tolist() for b_i in problem.b],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_problem(path) -> QuadraticProblem:
    """Read a problem definition written by :func:`save_problem`."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    n = int(doc["n"])
    m = int(doc["m"])
    a = np.array([np.asarray(row, dtype=float).reshape(n, n) for row in doc["a"]])
    b = np.array([np.asarray(row, dtype=float) for row in doc["b"]])
    if a.shape != (m, n, n) or b.shape != (m, n):
        raise ConfigError(f"inconsistent problem definition in {path}")
    ev = _QuadraticEvaluators(a, b)
    return QuadraticProblem(
        name=doc["name"],
        n=n,
        m=m,
        lower=np.asarray(doc["lower"], dtype=float),
        upper=np.asarray(doc["upper"], dtype=float),
        objectives=ev.objectives,
        jacobian=ev.jacobian,
        hessians=ev.hessians,
        a=a,
        b=b,
    )
