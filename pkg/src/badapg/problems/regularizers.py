"""Nonsmooth terms ``g`` and their Bregman proximal maps.

Each proximal map is written in mirror coordinates: given a dual vector
``eta`` and a stepsize ``gamma`` it returns

    argmin_w  g(w) + (h(w) - <eta, w>) / gamma,

which is the Bregman proximal gradient update from ``y`` when
``eta = grad h(y) - gamma * grad f(y)``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize
from scipy.special import softmax

from ..errors import ConfigurationError, ProxError
from ..kernels import EntropyKernel, EuclideanKernel, QuarticKernel

__all__ = ["Regularizer", "ZeroFunction", "L1Norm", "SimplexIndicator", "soft_threshold"]


def soft_threshold(u, tau):
    """Componentwise shrinkage ``sign(u) max(|u| - tau, 0)``."""
    u = np.asarray(u, dtype=float)
    return np.sign(u) * np.maximum(np.abs(u) - tau, 0.0)


class Regularizer:
    name = "g"

    def value(self, x):
        raise NotImplementedError

    def prox_mirror(self, kernel, eta, gamma):
        raise NotImplementedError

    def supports(self, kernel, dim=1):
        try:
            self.prox_mirror(kernel, np.ones(dim), 1.0)
        except ConfigurationError:
            return False
        return True

    def subgradient_distance(self, x, u):
        """Euclidean distance from `u` to the subdifferential at `x`."""
        raise NotImplementedError

    def _unsupported(self, kernel):
        return ConfigurationError(f"no Bregman prox for g={self.name} with the {kernel.name} kernel")


class ZeroFunction(Regularizer):
    """``g = 0``: the update is a pure mirror step."""

    name = "zero"

    def value(self, x):
        return 0.0

    def prox_mirror(self, kernel, eta, gamma):
        return kernel.mirror_inverse(eta)

    def subgradient_distance(self, x, u):
        return float(np.linalg.norm(u))


class L1Norm(Regularizer):
    """``g(x) = lam * ||x||_1``.

    With the entropy kernel the problem lives on the nonnegative orthant, so
    the term is ``lam * sum(x)`` there.
    """

    name = "l1"

    def __init__(self, lam):
        if lam < 0:
            raise ValueError("lam must be nonnegative")
        self.lam = float(lam)

    def value(self, x):
        return self.lam * float(np.sum(np.abs(x)))

    def prox_mirror(self, kernel, eta, gamma):
        eta = np.asarray(eta, dtype=float)
        if isinstance(kernel, EuclideanKernel):
            return soft_threshold(eta, gamma * self.lam)
        if isinstance(kernel, QuarticKernel):
            # grad h(w) = (||w||^2 + 1) w  equals the shrunk dual vector u
            u = soft_threshold(eta, gamma * self.lam)
            try:
                return kernel.mirror_inverse(u)
            except ArithmeticError as exc:
                raise ProxError("quartic-l1 scalar solve failed") from exc
        if isinstance(kernel, EntropyKernel):
            return np.exp(eta - 1.0 - gamma * self.lam)
        raise self._unsupported(kernel)

    def subgradient_distance(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        nz = x != 0
        r = np.where(nz, u - self.lam * np.sign(x), np.maximum(np.abs(u) - self.lam, 0.0))
        return float(np.linalg.norm(r))

    def __repr__(self):
        return f"L1Norm(lam={self.lam})"


class SimplexIndicator(Regularizer):
    """Indicator of the probability simplex.

    Only the entropy kernel has a closed-form Bregman projection here,
    ``w_i = y_i exp(-gamma v_i) / sum_j y_j exp(-gamma v_j)``.
    """

    name = "simplex"

    def __init__(self, tol=1e-9):
        self.tol = tol

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if np.all(x >= 0) and abs(float(np.sum(x)) - 1.0) <= self.tol:
            return 0.0
        return math.inf

    def prox_mirror(self, kernel, eta, gamma):
        if isinstance(kernel, EntropyKernel):
            return softmax(np.asarray(eta, dtype=float))
        raise self._unsupported(kernel)

    def subgradient_distance(self, x, u):
        # normal cone at x: {mu * 1 - nu : nu >= 0, nu_i = 0 where x_i > 0}
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        pos = x > 0
        if np.all(pos):
            return float(np.linalg.norm(u - u.mean()))

        def sq(mu):
            return float(np.sum((u[pos] - mu) ** 2) + np.sum(np.maximum(u[~pos] - mu, 0.0) ** 2))

        res = optimize.minimize_scalar(sq, bounds=(u.min() - 1.0, u.max() + 1.0), method="bounded")
        return math.sqrt(res.fun)
