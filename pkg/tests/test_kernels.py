import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from badapg.errors import ConfigurationError, DomainError
from badapg.kernels import (
    EntropyKernel,
    EuclideanKernel,
    QuadraticKernel,
    QuarticKernel,
    bregman_distance,
    bregman_pair,
    conjugate_bregman_distance,
    make_kernel,
    mirror_inverse_quartic,
)
from conftest import finite_difference_gradient, interior_point

mp.mp.dps = 40

coords = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)
positive = st.floats(min_value=1e-3, max_value=20.0, allow_nan=False)


# hand values -----------------------------------------------------------------

def test_euclidean_distance_half_squared_norm():
    assert bregman_distance(EuclideanKernel(), [1.0, 0.0], [0.0, 0.0]) == 0.5


def test_entropy_distance_vanishes_on_diagonal():
    assert bregman_distance(EntropyKernel(), [0.3, 0.7], [0.3, 0.7]) == 0.0


def test_quartic_distance_scalar():
    # h(2) - h(1) - h'(1) (2 - 1) with h(t) = t^4/4 + t^2/2 and h'(1) = 2
    expected = (16 / 4 + 4 / 2) - (1 / 4 + 1 / 2) - 2 * 1
    assert expected == 3.25
    assert bregman_distance(QuarticKernel(), [2.0], [1.0]) == pytest.approx(3.25, rel=1e-15)


def test_euclidean_conjugate_distance():
    assert conjugate_bregman_distance(EuclideanKernel(), [2.0, 0.0], [0.0, 0.0]) == 2.0


@pytest.mark.parametrize("eta", [[0.5, -1.0], [3.0, 2.0]])
def test_conjugate_distance_vanishes_on_diagonal(kernel, eta):
    if kernel.name == "quadratic":
        eta = eta + [0.0]
    assert conjugate_bregman_distance(kernel, eta, eta) == pytest.approx(0.0, abs=1e-15)


def test_quartic_mirror_inverse_zero():
    np.testing.assert_array_equal(mirror_inverse_quartic(np.zeros(2)), np.zeros(2))


def test_quartic_mirror_inverse_unit_root():
    np.testing.assert_allclose(mirror_inverse_quartic(np.array([2.0, 0.0])), [1.0, 0.0], rtol=1e-15)


def test_quartic_mirror_inverse_against_polynomial_root():
    roots = [r for r in mp.polyroots([1, 0, 1, -10], extraprec=100) if abs(mp.im(r)) < 1e-30]
    t = float(mp.re(roots[0]))
    # t^3 + t = 10 has the exact root t = 2
    assert t == pytest.approx(2.0, rel=1e-15)
    x = mirror_inverse_quartic(np.array([0.0, 10.0]))
    np.testing.assert_allclose(x, [0.0, 10.0 / (t * t + 1.0)], rtol=1e-14)
    np.testing.assert_allclose(QuarticKernel().gradient(x), [0.0, 10.0], rtol=1e-10)


# structural properties ------------------------------------------------------

def test_gradient_matches_finite_differences(kernel):
    rng = np.random.default_rng(3)
    for _ in range(5):
        x = interior_point(kernel, rng) + (0.5 if kernel.name == "entropy" else 0.0)
        fd = finite_difference_gradient(kernel.value, x)
        np.testing.assert_allclose(kernel.gradient(x), fd, rtol=1e-6, atol=1e-8)


def test_mirror_round_trip(kernel):
    rng = np.random.default_rng(4)
    for _ in range(50):
        x = interior_point(kernel, rng)
        np.testing.assert_allclose(kernel.mirror_inverse(kernel.gradient(x)), x, rtol=1e-12)


def test_fenchel_young_equality(kernel):
    rng = np.random.default_rng(5)
    for _ in range(50):
        x = interior_point(kernel, rng)
        eta = kernel.gradient(x)
        lhs = kernel.value(x) + kernel.conjugate_value(eta)
        assert lhs == pytest.approx(float(np.dot(x, eta)), rel=1e-12, abs=1e-12)


def test_distance_duality(kernel):
    rng = np.random.default_rng(6)
    for _ in range(100):
        x, y = interior_point(kernel, rng), interior_point(kernel, rng)
        d = bregman_distance(kernel, x, y)
        d_star = conjugate_bregman_distance(kernel, kernel.gradient(y), kernel.gradient(x))
        assert d_star == pytest.approx(d, rel=1e-10, abs=1e-300)


def test_bregman_pair_symmetrized(kernel):
    rng = np.random.default_rng(7)
    x, y = interior_point(kernel, rng), interior_point(kernel, rng)
    pair = bregman_pair(kernel, x, y)
    inner = float(np.dot(kernel.gradient(x) - kernel.gradient(y), x - y))
    assert pair.symmetrized == pytest.approx(inner, rel=1e-10)


@given(st.lists(positive, min_size=1, max_size=4), st.lists(positive, min_size=1, max_size=4))
def test_entropy_distance_matches_high_precision(xs, ys):
    n = min(len(xs), len(ys))
    x, y = np.array(xs[:n]), np.array(ys[:n])
    exact = sum(mp.mpf(a) * mp.log(mp.mpf(a) / mp.mpf(b)) - mp.mpf(a) + mp.mpf(b) for a, b in zip(x, y))
    assert EntropyKernel().distance(x, y) == pytest.approx(float(exact), rel=1e-12, abs=1e-300)


@given(st.lists(coords, min_size=1, max_size=4), st.lists(coords, min_size=1, max_size=4))
def test_quartic_distance_matches_high_precision(xs, ys):
    n = min(len(xs), len(ys))
    x = [mp.mpf(v) for v in xs[:n]]
    y = [mp.mpf(v) for v in ys[:n]]

    def h(z):
        s = sum(v * v for v in z)
        return s * s / 4 + s / 2

    sy = sum(v * v for v in y)
    exact = h(x) - h(y) - sum((sy + 1) * b * (a - b) for a, b in zip(x, y))
    got = QuarticKernel().distance(np.array(xs[:n]), np.array(ys[:n]))
    assert got == pytest.approx(float(exact), rel=1e-12, abs=1e-300)


@given(st.lists(st.floats(min_value=-1e3, max_value=1e3, allow_nan=False), min_size=1, max_size=5))
def test_quartic_mirror_inverse_solves_gradient_equation(eta):
    eta = np.array(eta)
    x = mirror_inverse_quartic(eta)
    np.testing.assert_allclose(QuarticKernel().gradient(x), eta, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("rel", [1e-2, 1e-6, 1e-10])
def test_close_pair_differences_are_accurate(kernel, rel):
    """Stable difference forms against 40-digit arithmetic on close pairs."""
    rng = np.random.default_rng(11)
    y = interior_point(kernel, rng)
    x = y * (1.0 + rel * rng.standard_normal(y.size))

    def grad_mp(z):
        z = [mp.mpf(v) for v in z]
        if kernel.name == "entropy":
            return [mp.log(v) + 1 for v in z]
        if kernel.name == "quartic":
            s = sum(v * v for v in z)
            return [(s + 1) * v for v in z]
        if kernel.name == "quadratic":
            Q = mp.matrix(kernel.Q.tolist())
            return list(Q * mp.matrix(z))
        return z

    exact = [a - b for a, b in zip(grad_mp(x), grad_mp(y))]
    scale = max(abs(e) for e in exact)
    got = kernel.gradient_difference(x, y)
    err = max(abs(mp.mpf(g) - e) for g, e in zip(got, exact)) / scale
    assert float(err) < 1e-12


@pytest.mark.parametrize("rel", [1e-3, 1e-8])
def test_dual_offset_distance_close_pairs(rel):
    # D*(eta + d, eta) = D(x, x') where x' is the preimage of eta + d
    rng = np.random.default_rng(12)
    for kernel in (EntropyKernel(), QuarticKernel()):
        y = interior_point(kernel, rng)
        eta = kernel.gradient(y)
        d = rel * np.abs(eta).max() * rng.standard_normal(y.size)
        x = kernel.mirror_inverse(eta)
        got = kernel.dual_offset_distance(eta, d, x=x)
        etam = [mp.mpf(v) for v in eta]
        dm = [mp.mpf(v) for v in d]
        if kernel.name == "entropy":
            exact = sum(mp.exp(e - 1) * (mp.expm1(s) - s) for e, s in zip(etam, dm))
        else:
            def inv(z):
                n = mp.sqrt(sum(v * v for v in z))
                t = [r for r in mp.polyroots([1, 0, 1, -n], extraprec=200) if abs(mp.im(r)) < 1e-30]
                t = mp.re(t[0])
                return [v / (t * t + 1) for v in z]

            def conj(z):
                w = inv(z)
                s = sum(v * v for v in w)
                return sum(a * b for a, b in zip(z, w)) - (s * s / 4 + s / 2)

            xm = inv(etam)
            shifted = [a + b for a, b in zip(etam, dm)]
            exact = conj(shifted) - conj(etam) - sum(a * b for a, b in zip(xm, dm))
        assert got == pytest.approx(float(exact), rel=1e-10)


def test_quartic_symmetry_coefficient_lower_bound():
    rng = np.random.default_rng(8)
    k = QuarticKernel()
    worst = math.inf
    for _ in range(2000):
        x = rng.standard_normal(2) * 10 ** rng.uniform(-2, 2)
        y = rng.standard_normal(2) * 10 ** rng.uniform(-2, 2)
        worst = min(worst, k.distance(x, y) / k.distance(y, x))
    assert worst >= 2 - math.sqrt(3) - 1e-12


# construction and errors ----------------------------------------------------

def test_make_kernel_names():
    assert isinstance(make_kernel("euclidean"), EuclideanKernel)
    assert isinstance(make_kernel("entropy"), EntropyKernel)
    assert isinstance(make_kernel("quartic"), QuarticKernel)
    q = make_kernel("quadratic", n=4, seed=1)
    assert q.Q.shape == (4, 4)
    with pytest.raises(ConfigurationError):
        make_kernel("quadratic")
    with pytest.raises(ConfigurationError):
        make_kernel("burg")


def test_quadratic_kernel_rejects_bad_matrices():
    with pytest.raises(ConfigurationError):
        QuadraticKernel([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ConfigurationError):
        QuadraticKernel([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(ConfigurationError):
        QuadraticKernel([1.0, 2.0])


def test_quadratic_random_condition_number():
    q = QuadraticKernel.random(6, seed=2, condition=10.0)
    ev = np.linalg.eigvalsh(q.Q)
    assert ev[-1] / ev[0] == pytest.approx(10.0, rel=1e-10)


def test_entropy_domain_errors():
    k = EntropyKernel()
    with pytest.raises(DomainError):
        bregman_distance(k, [1.0, 1.0], [0.0, 1.0])
    assert not k.in_interior(np.array([0.0, 1.0]))
    assert k.in_domain(np.array([0.0, 1.0]))
    # points on the boundary are allowed as the first argument
    assert bregman_distance(k, [0.0, 1.0], [1.0, 1.0]) == pytest.approx(1.0)
