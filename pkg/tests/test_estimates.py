import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from badapg.errors import DegeneratePairError
from badapg.estimates import (
    bregman_cauchy_schwarz_delta,
    bregman_young_bound,
    curvature_estimate,
    local_estimates,
    make_snapshot,
    smoothness_estimate,
    symmetry_estimate,
)
from badapg.kernels import EntropyKernel, EuclideanKernel, QuadraticKernel, QuarticKernel
from conftest import interior_point


def snap_for(kernel, grad_f, x_prev, x_curr, gamma=0.5):
    x_prev, x_curr = np.asarray(x_prev, float), np.asarray(x_curr, float)
    return make_snapshot(kernel, x_prev, x_curr, grad_f(x_prev), grad_f(x_curr), gamma)


# smoothness -----------------------------------------------------------------

def test_smoothness_of_kernel_itself_is_one(kernel):
    rng = np.random.default_rng(0)
    x, y = interior_point(kernel, rng), interior_point(kernel, rng)
    s = snap_for(kernel, kernel.gradient, x, y)
    assert smoothness_estimate(s, kernel) == pytest.approx(1.0, rel=1e-10)
    assert smoothness_estimate(s) == pytest.approx(1.0, rel=1e-10)


def test_smoothness_of_linear_function_is_zero(kernel):
    rng = np.random.default_rng(1)
    c = rng.standard_normal(3)
    x, y = interior_point(kernel, rng), interior_point(kernel, rng)
    assert smoothness_estimate(snap_for(kernel, lambda z: c, x, y), kernel) == 0.0


def test_smoothness_hand_ratio():
    # f(x) = x^2: (2 * 1) * 1 over (1 * 1)
    s = snap_for(EuclideanKernel(), lambda z: 2.0 * z, [0.0], [1.0])
    assert smoothness_estimate(s, EuclideanKernel()) == 2.0


def test_degenerate_pair_raises():
    k = EuclideanKernel()
    s = snap_for(k, lambda z: z, [1.0, 2.0], [1.0, 2.0])
    with pytest.raises(DegeneratePairError):
        smoothness_estimate(s, k)
    with pytest.raises(DegeneratePairError):
        local_estimates(k, s, 1.0)


# symmetry -------------------------------------------------------------------

def test_symmetry_euclidean_is_one():
    rng = np.random.default_rng(2)
    k = EuclideanKernel()
    s = snap_for(k, lambda z: z, rng.standard_normal(4), rng.standard_normal(4))
    assert symmetry_estimate(k, s) == pytest.approx(1.0, rel=1e-14)


def test_symmetry_entropy_scalar():
    k = EntropyKernel()
    s = snap_for(k, lambda z: z, [1.0], [math.e])
    # D(e, 1) = e - e + 1 = 1, D(1, e) = -1 - 1 + e
    expected = (math.e * 1 - math.e + 1) / (1 * (-1) - 1 + math.e)
    assert expected == pytest.approx(1.0 / (math.e - 2.0), rel=1e-14)
    assert symmetry_estimate(k, s) == pytest.approx(expected, rel=1e-13)


@given(st.lists(st.floats(-1e2, 1e2), min_size=4, max_size=4))
def test_symmetry_quartic_lower_bound(v):
    k = QuarticKernel()
    x, y = np.array(v[:2]), np.array(v[2:])
    if np.allclose(x, y):
        return
    s = snap_for(k, lambda z: z, x, y)
    assert symmetry_estimate(k, s) >= 2.0 - math.sqrt(3.0) - 1e-12


# curvature ------------------------------------------------------------------

@pytest.mark.parametrize("delta", [0.1, 1.0, 7.0])
def test_curvature_euclidean_is_squared_lipschitz_ratio(delta):
    rng = np.random.default_rng(3)
    M = rng.standard_normal((4, 4))
    M = M @ M.T
    k = EuclideanKernel()
    gamma = 0.3
    x, y = rng.standard_normal(4), rng.standard_normal(4)
    s = snap_for(k, lambda z: M @ z, x, y, gamma)
    dH = (y - x) - gamma * (M @ (y - x))
    expected = float(dH @ dH) / float((y - x) @ (y - x))
    assert curvature_estimate(k, s, delta) == pytest.approx(expected, rel=1e-12)


@given(st.floats(0.01, 100.0), st.floats(1e-3, 10.0))
def test_curvature_linear_f_is_one(delta, gamma):
    k = EuclideanKernel()
    s = make_snapshot(k, np.array([0.0, 1.0]), np.array([2.0, -1.0]), np.ones(2), np.ones(2), gamma)
    assert curvature_estimate(k, s, delta) == pytest.approx(1.0, rel=1e-12)


def test_curvature_quadratic_kernel_identity():
    # with h = <x, Qx>/2 the estimate equals gamma^2 L^2 - 2 gamma ell + 1
    k = QuadraticKernel.random(5, seed=4)
    rng = np.random.default_rng(5)
    B = rng.standard_normal((5, 5))
    B = B @ B.T
    gamma = 0.2
    x, y = rng.standard_normal(5), rng.standard_normal(5)
    s = snap_for(k, lambda z: B @ z, x, y, gamma)
    d = y - x
    dg = B @ d
    qd = k.Q @ d
    ell = float(dg @ d) / float(d @ qd)
    L2 = float(dg @ np.linalg.solve(k.Q, dg)) / float(d @ qd)
    expected = gamma**2 * L2 - 2 * gamma * ell + 1
    for delta in (0.5, 2.0):
        assert curvature_estimate(k, s, delta) == pytest.approx(expected, rel=1e-10)


def test_curvature_rejects_nonpositive_delta():
    k = EuclideanKernel()
    s = snap_for(k, lambda z: z, [0.0], [1.0])
    with pytest.raises(ValueError):
        curvature_estimate(k, s, 0.0)


def test_local_estimates_clamps_negative_ell():
    k = EuclideanKernel()
    s = snap_for(k, lambda z: -z, [0.0], [1.0])
    est = local_estimates(k, s, 1.0)
    assert est.ell == 0.0
    assert est.ell_raw == pytest.approx(-1.0)
    assert est.ell_clamped


# Bregman-Young and Cauchy-Schwarz --------------------------------------------

def test_young_zero_vector(kernel):
    rng = np.random.default_rng(6)
    x, y = interior_point(kernel, rng), interior_point(kernel, rng)
    b = bregman_young_bound(kernel, x, y, np.zeros(3), 2.0)
    assert b == pytest.approx(kernel.distance(x, y) / 2.0, rel=1e-14)
    assert b >= 0


@given(st.lists(st.floats(-10, 10), min_size=6, max_size=6), st.floats(1e-3, 1e3))
def test_young_euclidean_closed_form(v, delta):
    x, y, w = np.array(v[:2]), np.array(v[2:4]), np.array(v[4:])
    b = bregman_young_bound(EuclideanKernel(), x, y, w, delta)
    expected = float((x - y) @ (x - y)) / (2 * delta) + delta * float(w @ w) / 2
    assert b == pytest.approx(expected, rel=1e-12, abs=1e-300)
    assert float((x - y) @ w) <= b + 1e-12 * (1 + abs(b))


@given(st.lists(st.floats(1e-2, 10.0), min_size=4, max_size=4),
       st.lists(st.floats(-3.0, 3.0), min_size=2, max_size=2), st.floats(1e-3, 10.0))
def test_young_entropy_inequality(pts, v, delta):
    x, y, w = np.array(pts[:2]), np.array(pts[2:]), np.array(v)
    b = bregman_young_bound(EntropyKernel(), x, y, w, delta)
    assert float((x - y) @ w) - b <= 1e-10 * (1 + abs(b))


def test_cauchy_schwarz_euclidean():
    x, y, v = np.array([3.0, 4.0]), np.zeros(2), np.array([0.0, 2.0])
    d = bregman_cauchy_schwarz_delta(EuclideanKernel(), x, y, v)
    assert d == pytest.approx(5.0 / 2.0, rel=1e-11)
    bound = bregman_young_bound(EuclideanKernel(), x, y, v, d)
    assert bound == pytest.approx(5.0 * 2.0, rel=1e-11)
    # homogeneity in v
    d3 = bregman_cauchy_schwarz_delta(EuclideanKernel(), x, y, 3 * v)
    assert d3 == pytest.approx(d / 3, rel=1e-11)


def test_cauchy_schwarz_quartic_residual():
    rng = np.random.default_rng(7)
    k = QuarticKernel()
    for _ in range(20):
        x, y, v = rng.standard_normal(3), rng.standard_normal(3), rng.standard_normal(3)
        d = bregman_cauchy_schwarz_delta(k, x, y, v)
        gy = k.gradient(y)
        res = k.dual_distance(gy, gy + d * v) - k.distance(x, y)
        assert abs(res) <= 1e-10 * k.distance(x, y)
        # the root minimizes the bound
        b = bregman_young_bound(k, x, y, v, d)
        for f in (0.9, 1.1):
            assert b <= bregman_young_bound(k, x, y, v, f * d) * (1 + 1e-12)


def test_cauchy_schwarz_requires_distinct_points():
    with pytest.raises(ValueError):
        bregman_cauchy_schwarz_delta(EuclideanKernel(), np.ones(2), np.ones(2), np.ones(2))
