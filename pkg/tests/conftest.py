from __future__ import annotations

import numpy as np
import pytest

from mopbench.core import Metric


def grid_dual_minimum(gram: np.ndarray, step: float) -> float:
    """Brute-force minimum of 0.5 lam' M lam over the simplex grid.

    Independent oracle for the Frank-Wolfe dual solver; enumerates the
    simplex with the given step for m in {1, 2, 3}.
    """
    m = gram.shape[0]
    if m == 1:
        return 0.5 * float(gram[0, 0])
    if m == 2:
        u = np.arange(0.0, 1.0 + step / 2, step)
        lam = np.stack([1.0 - u, u], axis=1)
        return float(np.min(0.5 * np.einsum("ki,ij,kj->k", lam, gram, lam)))
    if m == 3:
        best = np.inf
        u = np.arange(0.0, 1.0 + step / 2, step)
        for a in u:
            b = np.arange(0.0, 1.0 - a + step / 2, step)
            lam = np.stack([np.full_like(b, a), b, 1.0 - a - b], axis=1)
            best = min(best, float(np.min(0.5 * np.einsum("ki,ij,kj->k", lam, gram, lam))))
        return best
    raise NotImplementedError("grid oracle implemented for m <= 3")


def random_spd(rng: np.random.Generator, n: int, shift: float = 0.1) -> np.ndarray:
    a = rng.standard_normal((n, n))
    return a @ a.T + shift * np.eye(n)


def random_metric(rng: np.random.Generator, n: int, shift: float = 0.1) -> Metric:
    return Metric.from_matrix(random_spd(rng, n, shift))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
