from __future__ import annotations

import numpy as np
import pytest

from mopbench.core import ConfigError, Metric
from mopbench.scales import compute_alpha, compute_alpha_euclidean
from conftest import random_spd

ALPHA_MIN, ALPHA_MAX = 1e-3, 1e3


def test_positive_curvature_branch():
    scales = compute_alpha_euclidean(
        np.array([1.0, 0.0]), np.array([[5.0, 0.0]]), ALPHA_MIN, ALPHA_MAX
    )
    assert scales.alpha[0] == pytest.approx(5.0)


def test_positive_branch_arithmetic():
    # s = (1, 1), y = (3, 1): <s, y>/||s||^2 = 4/2 = 2
    scales = compute_alpha_euclidean(
        np.array([1.0, 1.0]), np.array([[3.0, 1.0]]), ALPHA_MIN, ALPHA_MAX
    )
    assert scales.alpha[0] == pytest.approx(2.0)


def test_negative_curvature_branch_with_metric():
    # s = (1, 0), y = (-2, 0), B = 2I: ||y|| / ||B s|| = 2/2 = 1
    metric = Metric(b=2.0 * np.eye(2), b_inv=0.5 * np.eye(2))
    scales = compute_alpha(
        np.array([1.0, 0.0]), np.array([[-2.0, 0.0]]), metric, ALPHA_MIN, ALPHA_MAX
    )
    assert scales.alpha[0] == pytest.approx(1.0)


def test_zero_curvature_hits_alpha_min():
    scales = compute_alpha_euclidean(
        np.array([1.0, 2.0]), np.zeros((3, 2)), ALPHA_MIN, ALPHA_MAX
    )
    np.testing.assert_array_equal(scales.alpha, np.full(3, ALPHA_MIN))


def test_stationary_pair_rejected():
    with pytest.raises(ConfigError):
        compute_alpha_euclidean(np.zeros(2), np.ones((1, 2)), ALPHA_MIN, ALPHA_MAX)


def test_clamping():
    s = np.array([1.0, 0.0])
    big = compute_alpha_euclidean(s, np.array([[1e9, 0.0]]), ALPHA_MIN, ALPHA_MAX)
    assert big.alpha[0] == ALPHA_MAX
    small = compute_alpha_euclidean(s, np.array([[1e-9, 0.0]]), ALPHA_MIN, ALPHA_MAX)
    assert small.alpha[0] == ALPHA_MIN


def test_euclidean_is_identity_metric_special_case(rng):
    for _ in range(50):
        n = int(rng.integers(2, 8))
        s = rng.standard_normal(n)
        y = rng.standard_normal((3, n))
        a = compute_alpha(s, y, Metric.identity(n), ALPHA_MIN, ALPHA_MAX)
        b = compute_alpha_euclidean(s, y, ALPHA_MIN, ALPHA_MAX)
        np.testing.assert_array_equal(a.alpha, b.alpha)


def test_quadratic_secant_value(rng):
    # for F with Hessian A, y = A s exactly, so alpha = s'As/s's
    for _ in range(20):
        n = 5
        a = random_spd(rng, n, shift=0.5)
        s = rng.standard_normal(n)
        y = (a @ s)[None, :]
        scales = compute_alpha_euclidean(s, y, ALPHA_MIN, ALPHA_MAX)
        assert scales.alpha[0] == pytest.approx(float(s @ a @ s) / float(s @ s))


def test_first_branch_sandwiched_by_relative_eigenvalues(rng):
    # unclamped value s'As/s'Bs lies within the spectrum of B^-1 A
    for _ in range(30):
        n = 6
        a = random_spd(rng, n, shift=0.5)
        b = random_spd(rng, n, shift=0.5)
        metric = Metric.from_matrix(b)
        s = rng.standard_normal(n)
        y = (a @ s)[None, :]
        scales = compute_alpha(s, y, metric, alpha_min=1e-12, alpha_max=1e12)
        vals = np.linalg.eigvalsh(np.linalg.solve(b, a))
        assert vals[0] - 1e-9 <= scales.alpha[0] <= vals[-1] + 1e-9


def test_scaled_identity_metric_consistency(rng):
    # with B = cI the first branch equals the Euclidean value divided by c
    for _ in range(30):
        n = 4
        c = float(10.0 ** rng.uniform(-2, 2))
        metric = Metric(b=c * np.eye(n), b_inv=np.eye(n) / c)
        s = rng.standard_normal(n)
        y = rng.standard_normal((2, n))
        positive = (y @ s) > 0
        wide = compute_alpha(s, y, metric, 1e-12, 1e12)
        euclid = compute_alpha_euclidean(s, y, 1e-12, 1e12)
        np.testing.assert_allclose(
            wide.alpha[positive], euclid.alpha[positive] / c, rtol=1e-12
        )


def test_bounds_always_hold(rng):
    for _ in range(100):
        n = int(rng.integers(2, 6))
        s = rng.standard_normal(n)
        y = 10.0 ** rng.uniform(-12, 12) * rng.standard_normal((2, n))
        scales = compute_alpha_euclidean(s, y, ALPHA_MIN, ALPHA_MAX)
        assert np.all(scales.alpha >= ALPHA_MIN) and np.all(scales.alpha <= ALPHA_MAX)
