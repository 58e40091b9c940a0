"""Local curvature estimates and the Bregman-Young machinery behind them.

Given two consecutive iterates ``x_prev``, ``x_curr`` and the stepsize
``gamma`` that produced ``x_curr``, three scalars drive the adaptive rules:

* ``ell``: relative smoothness of ``f`` along the segment, a Bregman analogue
  of an inverse Barzilai-Borwein step;
* ``a``: local symmetry ``D(x_curr, x_prev) / D(x_prev, x_curr)``;
* ``lambda``: curvature of the forward operator ``grad h - gamma * grad f``
  measured through the conjugate distance, parametrized by ``delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePairError, NumericalError
from .kernels import bregman_distance

__all__ = [
    "IterPairSnapshot",
    "LocalEstimates",
    "DEGENERATE_THRESHOLD",
    "make_snapshot",
    "symmetrized_distance",
    "smoothness_estimate",
    "symmetry_estimate",
    "curvature_estimate",
    "local_estimates",
    "bregman_young_bound",
    "bregman_cauchy_schwarz_delta",
]

DEGENERATE_THRESHOLD = 1e-300


@dataclass(frozen=True)
class IterPairSnapshot:
    """Two consecutive iterates with their gradients and mirror images."""

    x_prev: np.ndarray
    x_curr: np.ndarray
    grad_f_prev: np.ndarray
    grad_f_curr: np.ndarray
    mirror_prev: np.ndarray
    mirror_curr: np.ndarray
    gamma_curr: float
    mirror_delta: np.ndarray | None = None

    def mirror_difference(self):
        """``grad h(x_curr) - grad h(x_prev)``."""
        if self.mirror_delta is not None:
            return self.mirror_delta
        return self.mirror_curr - self.mirror_prev

    def forward_difference(self):
        """``H(x_curr) - H(x_prev)`` with ``H = grad h - gamma_curr * grad f``."""
        return self.mirror_difference() - self.gamma_curr * (self.grad_f_curr - self.grad_f_prev)


def make_snapshot(kernel, x_prev, x_curr, grad_prev, grad_curr, gamma_curr):
    """Build a snapshot, evaluating the mirror map at both points."""
    return IterPairSnapshot(
        x_prev=x_prev,
        x_curr=x_curr,
        grad_f_prev=grad_prev,
        grad_f_curr=grad_curr,
        mirror_prev=kernel.gradient(x_prev),
        mirror_curr=kernel.gradient(x_curr),
        gamma_curr=float(gamma_curr),
        mirror_delta=kernel.gradient_difference(x_curr, x_prev),
    )


@dataclass(frozen=True)
class LocalEstimates:
    ell: float
    a: float
    lam: float
    delta: float
    ell_raw: float = field(default=math.nan, compare=False)

    @property
    def ell_clamped(self):
        return self.ell_raw < 0


def symmetrized_distance(kernel, snap):
    """``D(x_curr, x_prev) + D(x_prev, x_curr)``, from the stable forms."""
    return kernel.distance(snap.x_curr, snap.x_prev) + kernel.distance(snap.x_prev, snap.x_curr)


def _check_pair(dsym):
    if not dsym >= DEGENERATE_THRESHOLD:
        raise DegeneratePairError(f"symmetrized distance {dsym!r} below {DEGENERATE_THRESHOLD}")


def smoothness_estimate(snap, kernel=None):
    """Ratio of symmetrized ``f``- and ``h``-distances along the last step.

    The denominator is ``<grad h(x_curr) - grad h(x_prev), x_curr - x_prev>``,
    or the cancellation-free symmetrized distance when `kernel` is given.
    """
    dx = snap.x_curr - snap.x_prev
    num = float(np.dot(snap.grad_f_curr - snap.grad_f_prev, dx))
    if kernel is None:
        den = float(np.dot(snap.mirror_difference(), dx))
    else:
        den = symmetrized_distance(kernel, snap)
    _check_pair(den)
    return num / den


def symmetry_estimate(kernel, snap):
    """``D(x_curr, x_prev) / D(x_prev, x_curr)``, strictly positive."""
    num = kernel.distance(snap.x_curr, snap.x_prev)
    den = kernel.distance(snap.x_prev, snap.x_curr)
    if not den > 0 or not num > 0:
        raise DegeneratePairError("zero Bregman distance between distinct iterates")
    return num / den


def curvature_estimate(kernel, snap, delta, dsym=None):
    """Bregman-Lipschitz estimate of the forward operator.

    ``2 D*(grad h(x_curr) + delta [H(x_curr) - H(x_prev)], grad h(x_curr))``
    divided by ``delta**2`` times the symmetrized distance.  The second
    argument of ``D*`` inverts to ``x_curr`` exactly, so at most the first
    one is mapped back through the mirror inverse.  The conjugate distance
    is evaluated from its offset to avoid cancellation on close pairs.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if dsym is None:
        dsym = symmetrized_distance(kernel, snap)
    _check_pair(dsym)
    num = kernel.dual_offset_distance(snap.mirror_curr, delta * snap.forward_difference(), x=snap.x_curr)
    return max(2.0 * num / (delta * delta * dsym), 0.0)


def local_estimates(kernel, snap, delta):
    """All three estimates at once; negative ``ell`` is clamped to zero."""
    dsym = symmetrized_distance(kernel, snap)
    _check_pair(dsym)
    dx = snap.x_curr - snap.x_prev
    ell_raw = float(np.dot(snap.grad_f_curr - snap.grad_f_prev, dx)) / dsym
    a = symmetry_estimate(kernel, snap)
    lam = curvature_estimate(kernel, snap, delta, dsym=dsym)
    return LocalEstimates(ell=max(ell_raw, 0.0), a=a, lam=lam, delta=float(delta), ell_raw=ell_raw)


def bregman_young_bound(kernel, x, y, v, delta):
    """Upper bound on ``<x - y, v>`` in terms of Bregman distances.

    Returns ``(D(x, y) + D*(grad h(y) + delta v, grad h(y))) / delta``,
    which dominates ``<x - y, v>`` for every ``delta > 0``.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    v = np.asarray(v, dtype=float)
    y = np.asarray(y, dtype=float)
    d_primal = bregman_distance(kernel, x, y)
    gy = kernel.gradient(y)
    with np.errstate(over="ignore"):
        d_dual = kernel.dual_distance(gy + delta * v, gy, x2=y)
    return (d_primal + d_dual) / delta


def _cs_residual(kernel, y, gy, v, dxy):
    def residual(delta):
        with np.errstate(over="ignore"):
            return kernel.dual_distance(gy, gy + delta * v) - dxy

    return residual


def bregman_cauchy_schwarz_delta(kernel, x, y, v, cap=2.0**60, rtol=1e-12):
    """Minimizer ``delta*`` of the Bregman-Young bound over ``delta > 0``.

    ``delta*`` solves ``D*(grad h(y), grad h(y) + delta v) = D(x, y)``; the
    left side is increasing in ``delta``.  Returns ``None`` when no root
    exists below `cap` (the bound then keeps decreasing in ``delta``).
    """
    v = np.asarray(v, dtype=float)
    y = np.asarray(y, dtype=float)
    dxy = bregman_distance(kernel, x, y)
    if not dxy > 0 or not np.any(v):
        raise ValueError("need x != y and v != 0")
    gy = kernel.gradient(y)
    residual = _cs_residual(kernel, y, gy, v, dxy)
    lo, hi = 0.0, 1.0
    r_hi = residual(hi)
    while r_hi < 0:
        lo = hi
        hi *= 2.0
        if hi > cap:
            return None
        r_hi = residual(hi)
    if math.isnan(r_hi):
        raise NumericalError("residual evaluated to NaN", {"delta": hi})
    for it in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        r = residual(mid)
        if r < 0:
            lo = mid
        elif r > 0:
            hi = mid
        else:
            return mid
        if hi - lo <= rtol * 1e-3 * hi:
            break
    else:
        raise NumericalError(
            "bisection for delta* did not converge", {"lo": lo, "hi": hi, "iterations": it}
        )
    return 0.5 * (lo + hi)
