"""Legendre kernels (distance-generating functions) and Bregman distances.

Every kernel exposes its value, gradient (the mirror map), the inverse of the
mirror map, and the value of its convex conjugate.  Bregman distances are
provided both through the generic definition and through closed forms that
avoid the cancellation of ``h(x) - h(y) - <grad h(y), x - y>`` when ``x`` and
``y`` are close; the closed forms are what the solvers use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.special import xlogy

from .errors import ConfigurationError, DomainError, NumericalError
from .roots import cubic_norm_root

__all__ = [
    "Kernel",
    "EuclideanKernel",
    "QuadraticKernel",
    "EntropyKernel",
    "QuarticKernel",
    "BregmanPair",
    "bregman_distance",
    "conjugate_bregman_distance",
    "bregman_pair",
    "mirror_inverse_quartic",
    "make_kernel",
    "KERNEL_NAMES",
]

FULL_SPACE = "full-space"
NONNEGATIVE_ORTHANT = "nonnegative-orthant"

# Below this magnitude the series expansions are more accurate than the
# closed forms; 14 terms leave a truncation error far below one ulp.
_SERIES_CUTOFF = 0.05
_SERIES_TERMS = 14
# coefficients of t^2, t^3, ... in the two expansions
_XLOGX_COEFFS = np.array([(-1.0) ** k / (k * (k - 1)) for k in range(2, _SERIES_TERMS + 2)])
_EXPM1_COEFFS = np.array([1.0 / math.factorial(k) for k in range(2, _SERIES_TERMS + 2)])


def _series_terms(tmax):
    """Terms needed for truncation below one ulp when ``|t| <= tmax``."""
    if tmax <= 0.0:
        return 1
    return int(min(_SERIES_TERMS, max(1, math.ceil(-37.0 / math.log(tmax)) + 1)))


def _series(t, coeffs):
    """``sum_j coeffs[j] t^(j + 2)`` by Horner's rule."""
    terms = _series_terms(float(np.max(np.abs(t)))) if t.size else 1
    acc = np.full_like(t, coeffs[terms - 1])
    for c in coeffs[terms - 2::-1] if terms > 1 else ():
        acc = acc * t + c
    return acc * t * t


def _one_plus_t_log_minus_t(t):
    """``(1 + t) log(1 + t) - t`` for ``t >= -1``, accurate near zero."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < _SERIES_CUTOFF
    if small.all():
        return _series(t, _XLOGX_COEFFS)
    out = np.empty_like(t)
    out[small] = _series(t[small], _XLOGX_COEFFS)
    tb = t[~small]
    out[~small] = xlogy(1.0 + tb, 1.0 + tb) - tb
    return out


def _expm1_minus_t(s):
    """``exp(s) - 1 - s``, accurate near zero."""
    s = np.asarray(s, dtype=float)
    small = np.abs(s) < _SERIES_CUTOFF
    if small.all():
        return _series(s, _EXPM1_COEFFS)
    out = np.empty_like(s)
    out[small] = _series(s[small], _EXPM1_COEFFS)
    sb = s[~small]
    out[~small] = np.expm1(sb) - sb
    return out


class Kernel:
    """Base class for Legendre kernels.

    Subclasses implement `value`, `gradient`, `mirror_inverse`,
    `conjugate_value`, `in_domain` and `in_interior`; `distance` and
    `dual_distance` default to the textbook formulas and are overridden
    with cancellation-free closed forms where available.
    """

    name = "kernel"
    domain = FULL_SPACE
    symmetry_coefficient: float | None = None
    strong_convexity_modulus: float | None = None

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def mirror_inverse(self, eta):
        raise NotImplementedError

    def conjugate_value(self, eta):
        raise NotImplementedError

    def in_domain(self, x):
        return bool(np.all(np.isfinite(x)))

    def in_interior(self, x):
        return self.in_domain(x)

    def distance(self, x, y):
        """Bregman distance ``D(x, y)``; `y` is assumed interior."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return float(self.value(x) - self.value(y) - np.dot(self.gradient(y), x - y))

    def dual_distance(self, eta1, eta2, x2=None):
        """Conjugate Bregman distance ``D*(eta1, eta2)``.

        `x2`, when given, must equal ``mirror_inverse(eta2)``; it saves an
        inversion.
        """
        eta1 = np.asarray(eta1, dtype=float)
        eta2 = np.asarray(eta2, dtype=float)
        if x2 is None:
            x2 = self.mirror_inverse(eta2)
        return float(
            self.conjugate_value(eta1) - self.conjugate_value(eta2) - np.dot(x2, eta1 - eta2)
        )

    def gradient_difference(self, x, y):
        """``grad h(x) - grad h(y)``, accurate when ``x`` is close to ``y``."""
        return self.gradient(x) - self.gradient(y)

    def dual_offset_distance(self, eta, d, x=None):
        """``D*(eta + d, eta)`` computed from the offset `d`.

        `x`, when given, must equal ``mirror_inverse(eta)``.
        """
        eta = np.asarray(eta, dtype=float)
        return self.dual_distance(eta + d, eta, x2=x)

    def __repr__(self):
        return f"{type(self).__name__}()"


class EuclideanKernel(Kernel):
    """``h(x) = ||x||^2 / 2``."""

    name = "euclidean"
    symmetry_coefficient = 1.0
    strong_convexity_modulus = 1.0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * float(np.dot(x, x))

    def gradient(self, x):
        return np.array(x, dtype=float)

    def mirror_inverse(self, eta):
        return np.array(eta, dtype=float)

    def conjugate_value(self, eta):
        return self.value(eta)

    def distance(self, x, y):
        d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return 0.5 * float(np.dot(d, d))

    def dual_distance(self, eta1, eta2, x2=None):
        return self.distance(eta1, eta2)

    def gradient_difference(self, x, y):
        return np.asarray(x, dtype=float) - np.asarray(y, dtype=float)

    def dual_offset_distance(self, eta, d, x=None):
        d = np.asarray(d, dtype=float)
        return 0.5 * float(np.dot(d, d))


class QuadraticKernel(Kernel):
    """``h(x) = <x, Q x> / 2`` for a symmetric positive definite ``Q``."""

    name = "quadratic"
    symmetry_coefficient = 1.0

    def __init__(self, Q):
        Q = np.array(Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ConfigurationError("Q must be a square matrix")
        if not np.allclose(Q, Q.T, rtol=1e-12, atol=1e-12):
            raise ConfigurationError("Q must be symmetric")
        Q = 0.5 * (Q + Q.T)
        try:
            self._cho = linalg.cho_factor(Q)
        except linalg.LinAlgError as exc:
            raise ConfigurationError("Q must be positive definite") from exc
        self.Q = Q
        self.Q.setflags(write=False)
        self.strong_convexity_modulus = float(linalg.eigvalsh(Q)[0])

    @classmethod
    def random(cls, n, seed=0, condition=10.0):
        """Random SPD kernel with eigenvalues log-spaced in ``[1, condition]``."""
        rng = np.random.default_rng(seed)
        U, _ = np.linalg.qr(rng.standard_normal((n, n)))
        eig = np.logspace(0.0, math.log10(condition), n)
        return cls((U * eig) @ U.T)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * float(x @ self.Q @ x)

    def gradient(self, x):
        return self.Q @ np.asarray(x, dtype=float)

    def mirror_inverse(self, eta):
        return linalg.cho_solve(self._cho, np.asarray(eta, dtype=float))

    def conjugate_value(self, eta):
        eta = np.asarray(eta, dtype=float)
        return 0.5 * float(eta @ self.mirror_inverse(eta))

    def distance(self, x, y):
        return self.value(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))

    def dual_distance(self, eta1, eta2, x2=None):
        return self.conjugate_value(np.asarray(eta1, dtype=float) - np.asarray(eta2, dtype=float))

    def gradient_difference(self, x, y):
        return self.Q @ (np.asarray(x, dtype=float) - np.asarray(y, dtype=float))

    def dual_offset_distance(self, eta, d, x=None):
        return self.conjugate_value(d)

    def __repr__(self):
        return f"QuadraticKernel(n={self.Q.shape[0]})"


class EntropyKernel(Kernel):
    """Boltzmann-Shannon entropy ``h(x) = sum_i x_i log x_i`` on ``x >= 0``.

    Uses ``0 log 0 = 0`` on the boundary.  Its Bregman distance is the
    Kullback-Leibler divergence.
    """

    name = "entropy"
    domain = NONNEGATIVE_ORTHANT
    symmetry_coefficient = 0.0

    def in_domain(self, x):
        x = np.asarray(x, dtype=float)
        return bool(np.all(np.isfinite(x)) and np.all(x >= 0))

    def in_interior(self, x):
        x = np.asarray(x, dtype=float)
        return bool(np.all(np.isfinite(x)) and np.all(x > 0))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if not self.in_domain(x):
            return math.inf
        return float(np.sum(xlogy(x, x)))

    def gradient(self, x):
        return np.log(np.asarray(x, dtype=float)) + 1.0

    def mirror_inverse(self, eta):
        return np.exp(np.asarray(eta, dtype=float) - 1.0)

    def conjugate_value(self, eta):
        return float(np.sum(np.exp(np.asarray(eta, dtype=float) - 1.0)))

    def distance(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        # y_i [(1 + t) log(1 + t) - t] with t = (x_i - y_i) / y_i
        return float(np.sum(y * _one_plus_t_log_minus_t((x - y) / y)))

    def dual_distance(self, eta1, eta2, x2=None):
        eta1 = np.asarray(eta1, dtype=float)
        eta2 = np.asarray(eta2, dtype=float)
        if x2 is None:
            x2 = self.mirror_inverse(eta2)
        return float(np.sum(x2 * _expm1_minus_t(eta1 - eta2)))

    def gradient_difference(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        t = (x - y) / y
        near = np.abs(t) < 0.5
        out = np.log(x) - np.log(y)
        out[near] = np.log1p(t[near])
        return out

    def dual_offset_distance(self, eta, d, x=None):
        if x is None:
            x = self.mirror_inverse(eta)
        return float(np.sum(x * _expm1_minus_t(d)))


def mirror_inverse_quartic(eta):
    """Inverse of ``x -> (||x||^2 + 1) x``.

    Returns ``eta / (t**2 + 1)`` where ``t >= 0`` solves ``t**3 + t = ||eta||``.
    """
    eta = np.asarray(eta, dtype=float)
    t = cubic_norm_root(float(np.linalg.norm(eta)))
    return eta / (t * t + 1.0)


def _quartic_offset_distance(y, d):
    """Quartic ``D(y + d, y)`` expanded in powers of `d`."""
    dd = float(np.dot(d, d))
    p = 2.0 * float(np.dot(y, d)) + dd
    return 0.5 * float(np.dot(y, y)) * dd + 0.25 * p * p + 0.5 * dd


class QuarticKernel(Kernel):
    """``h(x) = ||x||^4 / 4 + ||x||^2 / 2``, symmetry coefficient ``2 - sqrt(3)``."""

    name = "quartic"
    symmetry_coefficient = 2.0 - math.sqrt(3.0)
    strong_convexity_modulus = 1.0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        s = float(np.dot(x, x))
        return 0.25 * s * s + 0.5 * s

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        return (float(np.dot(x, x)) + 1.0) * x

    def mirror_inverse(self, eta):
        return mirror_inverse_quartic(eta)

    def conjugate_value(self, eta):
        eta = np.asarray(eta, dtype=float)
        x = mirror_inverse_quartic(eta)
        return float(np.dot(eta, x)) - self.value(x)

    def distance(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return _quartic_offset_distance(y, x - y)

    def dual_distance(self, eta1, eta2, x2=None):
        if x2 is None:
            x2 = self.mirror_inverse(eta2)
        return self.distance(x2, self.mirror_inverse(eta1))

    def gradient_difference(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = x - y
        return (float(np.dot(x, x)) + 1.0) * d + float(np.dot(d, x + y)) * y

    def dual_offset_distance(self, eta, d, x=None):
        eta = np.asarray(eta, dtype=float)
        d = np.asarray(d, dtype=float)
        if x is None:
            x = self.mirror_inverse(eta)
        # primal offset s with grad h(x + s) - grad h(x) = d, polished by
        # Newton steps on the cancellation-free difference
        s = self.mirror_inverse(eta + d) - x
        for _ in range(2):
            z = x + s
            zz = float(np.dot(z, z))
            c = zz + 1.0
            r = d - (c * s + float(np.dot(s, x + z)) * x)
            s = s + (r - (2.0 * float(np.dot(z, r)) / (c + 2.0 * zz)) * z) / c
        return _quartic_offset_distance(x + s, -s)


@dataclass(frozen=True)
class BregmanPair:
    """Forward, reverse and symmetrized Bregman distances of a point pair."""

    forward: float
    reverse: float

    @property
    def symmetrized(self):
        return self.forward + self.reverse


def _require_interior(kernel, y, what="y"):
    if not kernel.in_interior(y):
        raise DomainError(f"{what} must lie in the interior of dom h for the {kernel.name} kernel")


def bregman_distance(kernel, x, y):
    """``D(x, y) = h(x) - h(y) - <grad h(y), x - y>``.

    Raises `DomainError` when `y` is not interior; returns ``inf`` when `x`
    lies outside ``dom h``.
    """
    _require_interior(kernel, y)
    if not kernel.in_domain(x):
        return math.inf
    return max(kernel.distance(x, y), 0.0)


def conjugate_bregman_distance(kernel, eta1, eta2):
    """``D*(eta1, eta2)`` built from the conjugate ``h*`` (full domain)."""
    with np.errstate(over="raise", invalid="raise"):
        try:
            val = kernel.dual_distance(eta1, eta2)
        except FloatingPointError as exc:
            raise NumericalError("overflow evaluating the conjugate distance") from exc
    return max(val, 0.0)


def bregman_pair(kernel, x, y):
    """`BregmanPair` for two interior points."""
    _require_interior(kernel, x, "x")
    _require_interior(kernel, y)
    return BregmanPair(max(kernel.distance(x, y), 0.0), max(kernel.distance(y, x), 0.0))


KERNEL_NAMES = ("euclidean", "quadratic", "entropy", "quartic")


def make_kernel(name, n=None, Q=None, seed=0):
    """Build a kernel from its string identifier.

    ``"quadratic"`` needs either an explicit `Q` or a dimension `n`, in which
    case a seeded random SPD matrix is drawn.
    """
    key = name.strip().lower()
    if key == "euclidean":
        return EuclideanKernel()
    if key == "entropy":
        return EntropyKernel()
    if key == "quartic":
        return QuarticKernel()
    if key == "quadratic":
        if Q is not None:
            return QuadraticKernel(Q)
        if n is None:
            raise ConfigurationError("quadratic kernel needs Q or a dimension n")
        return QuadraticKernel.random(n, seed=seed)
    raise ConfigurationError(f"unknown kernel {name!r}; expected one of {KERNEL_NAMES}")
