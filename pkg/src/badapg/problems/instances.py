"""Instance generators for the four experiment families."""

from __future__ import annotations

import numpy as np
from scipy import linalg
from scipy.special import xlogy

from ..errors import ConfigurationError, DomainError
from ..kernels import EntropyKernel, EuclideanKernel, Kernel, QuarticKernel, make_kernel
from .base import ProblemInstance
from .regularizers import L1Norm, SimplexIndicator, ZeroFunction

__all__ = [
    "poly_hessian_instance",
    "kl_regression_instance",
    "logdet_simplex_instance",
    "lasso_instance",
    "least_squares_instance",
    "make_instance",
    "FAMILIES",
]

FAMILIES = ("poly", "kl", "logdet", "lasso")


def _noisy(rng, signal, noise_scale):
    """``signal`` plus uniform noise on ``[-1, 1]`` scaled by
    ``noise_scale * mean|signal|``."""
    scale = noise_scale * float(np.mean(np.abs(signal)))
    return signal + scale * rng.uniform(-1.0, 1.0, size=signal.shape)


def _resolve_kernel(kernel, default):
    if kernel is None:
        return default
    if isinstance(kernel, Kernel):
        return kernel
    return make_kernel(kernel)


def poly_hessian_instance(m, n, seed=0, noise_scale=0.1, kernel=None, A=None, C=None, b=None, d=None):
    """``f(x) = ||Ax - b||_4^4 / 4 + ||Cx - d||^2 / 2`` with ``g = 0``.

    The Hessian of ``f`` grows quadratically with ``||x||``, so ``f`` is
    smooth relative to the quartic kernel but not to the Euclidean one.
    Any explicitly passed array overrides the random draw.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    rng = np.random.default_rng(seed)
    A = rng.uniform(0.0, 1.0, (m, n)) if A is None else np.asarray(A, dtype=float)
    C = rng.uniform(0.0, 1.0, (m, n)) if C is None else np.asarray(C, dtype=float)
    x_true = rng.uniform(-1.0, 1.0, n)
    b = _noisy(rng, A @ x_true, noise_scale) if b is None else np.asarray(b, dtype=float)
    d = _noisy(rng, C @ x_true, noise_scale) if d is None else np.asarray(d, dtype=float)

    def f_value(x):
        r = A @ x - b
        s = C @ x - d
        r2 = r * r
        return 0.25 * float(r2 @ r2) + 0.5 * float(s @ s)

    def f_gradient(x):
        r = A @ x - b
        return A.T @ (r * r * r) + C.T @ (C @ x - d)

    kernel = _resolve_kernel(kernel, QuarticKernel())
    modulus = None
    if isinstance(kernel, QuarticKernel):
        nA = linalg.norm(A, 2)
        nb = float(np.linalg.norm(b))
        modulus = 3 * nA**4 + 6 * nA**3 * nb + 3 * nA**2 * nb**2 + linalg.norm(C, 2) ** 2
    return ProblemInstance(
        name="poly",
        f_value=f_value,
        f_gradient=f_gradient,
        g=ZeroFunction(),
        kernel=kernel,
        feasible_start=np.zeros(A.shape[1]),
        global_modulus=modulus,
        metadata={"family": "poly", "m": A.shape[0], "n": A.shape[1], "seed": seed,
                  "noise_scale": noise_scale},
    )


def kl_regression_instance(m, n, lam=0.001, seed=0, noise_scale=0.1, A=None, b=None, b_floor=1e-3):
    """``KL(Ax | b) + lam ||x||_1`` over ``x >= 0`` with the entropy kernel.

    ``A`` has uniform entries normalized so that all of them sum to one, and
    ``b`` is the noisy image of a uniform nonnegative signal, floored at
    `b_floor` to stay strictly positive.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    rng = np.random.default_rng(seed)
    if A is None:
        A = rng.uniform(0.0, 1.0, (m, n))
        A = A / A.sum()
    else:
        A = np.asarray(A, dtype=float)
    if np.any(A < 0):
        raise DomainError("A must be entrywise nonnegative")
    x_true = rng.uniform(0.0, 1.0, A.shape[1])
    if b is None:
        b = np.maximum(_noisy(rng, A @ x_true, noise_scale), b_floor)
    else:
        b = np.asarray(b, dtype=float)
    if np.any(b <= 0):
        raise DomainError("b must be strictly positive")

    def f_value(x):
        z = A @ x
        return float(np.sum(xlogy(z, z / b) - z + b))

    def f_gradient(x):
        z = A @ x
        with np.errstate(divide="ignore"):
            return A.T @ np.log(z / b)

    return ProblemInstance(
        name="kl",
        f_value=f_value,
        f_gradient=f_gradient,
        g=L1Norm(lam),
        kernel=EntropyKernel(),
        feasible_start=np.ones(A.shape[1]),
        global_modulus=float(np.max(np.sum(A, axis=0))),
        metadata={"family": "kl", "m": A.shape[0], "n": A.shape[1], "seed": seed, "lambda": lam,
                  "noise_scale": noise_scale},
    )


def logdet_simplex_instance(m, n, seed=0, H=None, dataset=None):
    """``log det(H diag(x)^-1 H^T)`` over the probability simplex.

    `H` is ``m x n`` with ``n >= m + 1`` and full row rank.  It is drawn
    from a standard normal unless given directly or read from a LIBSVM
    `dataset`, in which case ``H`` is the transposed design matrix
    (features by samples).
    """
    if dataset is not None:
        from .libsvm import read_libsvm

        X, _ = read_libsvm(dataset)
        H = np.asarray(X, dtype=float).T
    elif H is None:
        H = np.random.default_rng(seed).standard_normal((m, n))
    H = np.asarray(H, dtype=float)
    m, n = H.shape
    if n < m + 1:
        raise ConfigurationError(f"need n >= m + 1, got m={m}, n={n}")
    if np.linalg.matrix_rank(H) < m:
        raise ConfigurationError("H must have full row rank")

    def _chol(x):
        M = (H / x) @ H.T
        try:
            return linalg.cholesky(M, lower=True)
        except linalg.LinAlgError as exc:
            raise DomainError("M(x) is not positive definite") from exc

    def f_value(x):
        L = _chol(x)
        return 2.0 * float(np.sum(np.log(np.diag(L))))

    def f_gradient(x):
        L = _chol(x)
        W = linalg.solve_triangular(L, H, lower=True)
        return -np.sum(W * W, axis=0) / (x * x)

    return ProblemInstance(
        name="logdet",
        f_value=f_value,
        f_gradient=f_gradient,
        g=SimplexIndicator(),
        kernel=EntropyKernel(),
        feasible_start=np.full(n, 1.0 / n),
        global_modulus=None,
        metadata={"family": "logdet", "m": m, "n": n, "seed": seed,
                  "dataset": None if dataset is None else str(dataset)},
    )


def lasso_instance(m, n, lam=0.01, kernel="euclidean", seed=0, noise_scale=0.1, density=0.1, A=None, b=None):
    """``||Ax - b||^2 / 2 + lam ||x||_1`` with the Euclidean or quartic kernel.

    ``||A||^2`` is a relative smoothness constant for both kernels.
    """
    kernel = _resolve_kernel(kernel, EuclideanKernel())
    if not isinstance(kernel, (EuclideanKernel, QuarticKernel)):
        raise ConfigurationError("lasso supports the euclidean and quartic kernels only")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n)) if A is None else np.asarray(A, dtype=float)
    n = A.shape[1]
    x_true = rng.standard_normal(n) * (rng.uniform(size=n) < density)
    b = _noisy(rng, A @ x_true, noise_scale) if b is None else np.asarray(b, dtype=float)

    def f_value(x):
        r = A @ x - b
        return 0.5 * float(r @ r)

    def f_gradient(x):
        return A.T @ (A @ x - b)

    return ProblemInstance(
        name=f"lasso-{kernel.name}",
        f_value=f_value,
        f_gradient=f_gradient,
        g=L1Norm(lam),
        kernel=kernel,
        feasible_start=np.zeros(n),
        global_modulus=float(linalg.norm(A, 2) ** 2),
        metadata={"family": "lasso", "m": A.shape[0], "n": n, "seed": seed, "lambda": lam,
                  "kernel": kernel.name, "noise_scale": noise_scale},
    )


def least_squares_instance(m, n, seed=0, kernel="euclidean", noise_scale=0.1):
    """``||Ax - b||^2 / 2`` with ``g = 0`` under any full-space kernel.

    A smooth reference problem for kernels, such as a general quadratic,
    that have no closed-form prox for the other nonsmooth terms.
    """
    kernel = _resolve_kernel(kernel, EuclideanKernel())
    if kernel.domain != EuclideanKernel.domain:
        raise ConfigurationError("least squares is posed on the full space")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    b = _noisy(rng, A @ rng.standard_normal(n), noise_scale)

    def f_value(x):
        r = A @ x - b
        return 0.5 * float(r @ r)

    def f_gradient(x):
        return A.T @ (A @ x - b)

    return ProblemInstance(
        name="lsq",
        f_value=f_value,
        f_gradient=f_gradient,
        g=ZeroFunction(),
        kernel=kernel,
        feasible_start=np.zeros(n),
        global_modulus=None,
        metadata={"family": "lsq", "m": m, "n": n, "seed": seed, "kernel": kernel.name},
    )


def make_instance(family, m, n, seed=0, lam=None, kernel=None, noise_scale=0.1, dataset=None):
    """Dispatch on the family identifier used in harness configs."""
    family = family.strip().lower()
    if family == "poly":
        return poly_hessian_instance(m, n, seed=seed, noise_scale=noise_scale, kernel=kernel)
    if family == "kl":
        return kl_regression_instance(m, n, lam=0.001 if lam is None else lam, seed=seed,
                                      noise_scale=noise_scale)
    if family == "logdet":
        return logdet_simplex_instance(m, n, seed=seed, dataset=dataset)
    if family == "lasso":
        return lasso_instance(m, n, lam=0.01 if lam is None else lam, kernel=kernel or "euclidean",
                              seed=seed, noise_scale=noise_scale)
    raise ConfigurationError(f"unknown problem family {family!r}; expected one of {FAMILIES}")
