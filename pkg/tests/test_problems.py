import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from badapg.errors import ConfigurationError, DomainError, ParseError
from badapg.kernels import EntropyKernel, EuclideanKernel, QuarticKernel, make_kernel
from badapg.problems import (
    L1Norm,
    SimplexIndicator,
    ZeroFunction,
    kl_regression_instance,
    lasso_instance,
    least_squares_instance,
    logdet_simplex_instance,
    make_instance,
    poly_hessian_instance,
    read_libsvm,
    soft_threshold,
    write_libsvm,
)
from badapg.problems.libsvm import parse_libsvm_lines
from conftest import finite_difference_gradient


# poly-Hessian ---------------------------------------------------------------

def test_poly_identity_instance():
    p = poly_hessian_instance(1, 1, A=np.eye(1), C=np.eye(1), b=np.zeros(1), d=np.zeros(1))
    x = np.ones(1)
    assert p.f_value(x) == pytest.approx(0.25 + 0.5)
    np.testing.assert_allclose(p.f_gradient(x), [2.0])
    assert p.global_modulus == pytest.approx(4.0)
    assert isinstance(p.kernel, QuarticKernel)
    assert isinstance(p.g, ZeroFunction)


def test_poly_modulus_bounds_hessian():
    # L * hess h - hess f must be positive semidefinite at random points
    p = poly_hessian_instance(8, 4, seed=1)
    rng = np.random.default_rng(0)
    A, C = None, None
    for _ in range(20):
        x = rng.standard_normal(4) * 3
        h = finite_difference_hessian(p.f_gradient, x)
        s = float(x @ x)
        hk = (s + 1) * np.eye(4) + 2 * np.outer(x, x)
        assert np.linalg.eigvalsh(p.global_modulus * hk - h)[0] >= -1e-6 * p.global_modulus


def finite_difference_hessian(grad, x, h=1e-6):
    n = x.size
    H = np.zeros((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        H[:, i] = (grad(x + e) - grad(x - e)) / (2 * h)
    return 0.5 * (H + H.T)


@pytest.mark.parametrize("family", ["poly", "kl", "logdet", "lasso"])
def test_gradients_match_finite_differences(family):
    p = make_instance(family, 12, 6 if family != "logdet" else 15, seed=2)
    rng = np.random.default_rng(1)
    x = p.feasible_start + (0.1 * rng.uniform(0.5, 1.5, p.dimension) if family in ("kl", "logdet")
                            else 0.3 * rng.standard_normal(p.dimension))
    fd = finite_difference_gradient(p.f_value, x, h=1e-7)
    np.testing.assert_allclose(p.f_gradient(x), fd, rtol=1e-5, atol=1e-7 * np.abs(fd).max())


# KL regression --------------------------------------------------------------

def test_kl_vanishes_at_exact_fit():
    A = np.array([[0.2, 0.3], [0.1, 0.4]])
    x = np.array([1.0, 2.0])
    p = kl_regression_instance(2, 2, A=A, b=A @ x)
    assert p.f_value(x) == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(p.f_gradient(x), 0.0, atol=1e-15)


def test_kl_prox_fixed_point_without_shift():
    p = kl_regression_instance(3, 2, lam=0.0, seed=0)
    y = np.array([0.4, 1.7])
    np.testing.assert_allclose(p.prox(y, np.zeros(2), 0.7), y, rtol=1e-15)


def test_kl_prox_scalar():
    p = kl_regression_instance(1, 1, lam=math.log(2.0))
    np.testing.assert_allclose(p.prox(np.ones(1), np.zeros(1), 1.0), [0.5], rtol=1e-15)


def test_kl_rejects_negative_data():
    with pytest.raises(DomainError):
        kl_regression_instance(2, 2, A=-np.ones((2, 2)))
    with pytest.raises(DomainError):
        kl_regression_instance(2, 2, A=np.ones((2, 2)), b=np.array([1.0, 0.0]))


# log-det on the simplex -------------------------------------------------------

def test_logdet_requires_more_columns_than_rows():
    with pytest.raises(ConfigurationError):
        logdet_simplex_instance(3, 3, H=np.eye(3))


def test_logdet_requires_full_row_rank():
    H = np.ones((2, 5))
    with pytest.raises(ConfigurationError):
        logdet_simplex_instance(2, 5, H=H)


def test_simplex_prox_symmetric():
    p = logdet_simplex_instance(1, 2, H=np.array([[1.0, 2.0]]))
    np.testing.assert_allclose(p.prox(np.ones(2), np.zeros(2), 1.0), [0.5, 0.5], rtol=1e-15)


def test_simplex_prox_scalar():
    p = logdet_simplex_instance(1, 2, H=np.array([[1.0, 2.0]]))
    np.testing.assert_allclose(p.prox(np.ones(2), np.array([math.log(2.0), 0.0]), 1.0),
                               [1 / 3, 2 / 3], rtol=1e-14)


def test_logdet_cost_outside_simplex_is_infinite():
    p = logdet_simplex_instance(2, 4, seed=0)
    assert p.cost(np.full(4, 0.5)) == math.inf
    assert p.cost(np.array([1.0, -0.5, 0.25, 0.25])) == math.inf
    assert math.isfinite(p.cost(p.feasible_start))


def test_simplex_subgradient_distance():
    g = SimplexIndicator()
    # interior point: normal cone is the span of the ones vector
    assert g.subgradient_distance(np.full(3, 1 / 3), np.full(3, 2.0)) == pytest.approx(0.0, abs=1e-15)
    assert g.subgradient_distance(np.full(3, 1 / 3), np.array([1.0, 0.0, 0.0])) > 0.5
    # vertex: u_i <= mu allowed on the zero coordinates
    d = g.subgradient_distance(np.array([1.0, 0.0, 0.0]), np.array([1.0, -4.0, -2.0]))
    assert d == pytest.approx(0.0, abs=1e-6)


# lasso ----------------------------------------------------------------------

def test_soft_threshold():
    np.testing.assert_array_equal(soft_threshold(np.array([2.0, -0.5]), 1.0), [1.0, 0.0])
    np.testing.assert_array_equal(soft_threshold(np.array([-3.0, 0.9]), 1.0), [-2.0, 0.0])


def test_quartic_l1_prox_unit_point():
    k = QuarticKernel()
    g = L1Norm(1.0)
    eta = np.array([3.0, 0.5])          # shrinks to u = (2, 0)
    w = g.prox_mirror(k, eta, 1.0)
    np.testing.assert_allclose(w, [1.0, 0.0], rtol=1e-15, atol=1e-300)
    u = eta - k.gradient(w)
    assert g.subgradient_distance(w, u) == pytest.approx(0.0, abs=1e-14)


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3), st.floats(1e-3, 2.0))
def test_quartic_prox_without_shrinkage_is_mirror_step(v, gamma):
    k = QuarticKernel()
    x = np.array([0.3, -1.0, 2.0])
    eta = k.gradient(x) - gamma * np.array(v)
    np.testing.assert_allclose(L1Norm(0.0).prox_mirror(k, eta, gamma), k.mirror_inverse(eta), rtol=1e-14)


def test_lasso_kernel_choice():
    assert lasso_instance(5, 3, kernel="quartic").kernel.name == "quartic"
    assert lasso_instance(5, 3).kernel.name == "euclidean"
    with pytest.raises(ConfigurationError):
        lasso_instance(5, 3, kernel="entropy")


def test_lasso_modulus_is_squared_spectral_norm():
    p = lasso_instance(10, 4, seed=3)
    A = np.vstack([p.f_gradient(e) - p.f_gradient(np.zeros(4)) for e in np.eye(4)]).T
    assert p.global_modulus == pytest.approx(np.linalg.eigvalsh(A)[-1], rel=1e-12)


def test_l1_rejects_unsupported_kernel():
    q = make_kernel("quadratic", n=2)
    assert not L1Norm(0.1).supports(q, 2)
    assert ZeroFunction().supports(q, 2)
    with pytest.raises(ValueError):
        L1Norm(-1.0)


def test_least_squares_requires_full_space():
    with pytest.raises(ConfigurationError):
        least_squares_instance(4, 2, kernel="entropy")


def test_check_kernel_domain_mismatch():
    p = kl_regression_instance(4, 3)
    with pytest.raises(ConfigurationError):
        p.check_kernel(EuclideanKernel())
    p.check_kernel(EntropyKernel())


def test_make_instance_unknown_family():
    with pytest.raises(ConfigurationError):
        make_instance("burg", 3, 3)


def test_instances_are_seed_deterministic():
    a, b = make_instance("lasso", 6, 4, seed=5), make_instance("lasso", 6, 4, seed=5)
    x = np.arange(4.0)
    assert a.f_value(x) == b.f_value(x)
    assert make_instance("lasso", 6, 4, seed=6).f_value(x) != a.f_value(x)


# LIBSVM ---------------------------------------------------------------------

def test_libsvm_single_line():
    X, y = parse_libsvm_lines(["1.5 1:2.0 3:-1.0"])
    np.testing.assert_array_equal(X, [[2.0, 0.0, -1.0]])
    np.testing.assert_array_equal(y, [1.5])


def test_libsvm_empty_file(tmp_path):
    path = tmp_path / "empty.svm"
    path.write_text("")
    X, y = read_libsvm(path)
    assert X.shape == (0, 0)
    assert y.shape == (0,)


def test_libsvm_comments_and_blank_lines():
    X, y = parse_libsvm_lines(["# header", "", "-1 2:4 # trailing", "  "])
    np.testing.assert_array_equal(X, [[0.0, 4.0]])
    np.testing.assert_array_equal(y, [-1.0])


@pytest.mark.parametrize("line,lineno", [
    (["1 1:2", "x 1:2"], 2),
    (["1 0:2"], 1),
    (["1 2:1 1:3"], 1),
    (["1 a:3"], 1),
    (["1 1:abc"], 1),
    (["1 13"], 1),
])
def test_libsvm_malformed_lines_report_line_number(line, lineno):
    with pytest.raises(ParseError) as info:
        parse_libsvm_lines(line)
    assert info.value.line == lineno


def test_libsvm_feature_count_check():
    X, _ = parse_libsvm_lines(["1 2:1"], n_features=4)
    assert X.shape == (1, 4)
    with pytest.raises(ParseError):
        parse_libsvm_lines(["1 5:1"], n_features=4)


def test_libsvm_missing_file(tmp_path):
    with pytest.raises(OSError):
        read_libsvm(tmp_path / "missing.svm")


@given(st.integers(1, 8), st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_libsvm_round_trip(rows, cols, seed):
    import tempfile
    from pathlib import Path

    rng = np.random.default_rng(seed)
    X = sp.random(rows, cols, density=0.4, random_state=rng, format="csr")
    X.data = rng.standard_normal(X.data.size)
    y = rng.integers(-1, 2, rows).astype(float)
    with tempfile.TemporaryDirectory() as d:
        path = Path(d) / "data.svm"
        write_libsvm(path, X, y)
        X2, y2 = read_libsvm(path, n_features=cols, sparse=True)
    np.testing.assert_array_equal(X2.toarray(), X.toarray())
    np.testing.assert_array_equal(y2, y)


def test_logdet_from_dataset(tmp_path):
    rng = np.random.default_rng(0)
    X = rng.standard_normal((6, 3))      # 6 samples, 3 features
    path = tmp_path / "d.svm"
    write_libsvm(path, X, np.ones(6))
    p = logdet_simplex_instance(0, 0, dataset=path)
    assert p.dimension == 6
    assert math.isfinite(p.cost(p.feasible_start))
