"""The Bregman proximal gradient step and the two-stepsize initialization."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..errors import DegeneratePairError, DomainError, InitializationError
from ..kernels import NONNEGATIVE_ORTHANT

_TINY = np.finfo(float).tiny


def bpg_step(kernel, problem, x, gamma, grad=None):
    """``argmin_w <grad f(x), w> + g(w) + D(w, x) / gamma``.

    On the nonnegative orthant, coordinates that underflow to zero are
    lifted to the smallest normal float so the next iterate stays interior.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if not kernel.in_interior(x):
        raise DomainError("BPG step needs an interior point")
    if grad is None:
        grad = problem.f_gradient(x)
    eta = kernel.gradient(x) - gamma * grad
    w = problem.prox_mirror(kernel, eta, gamma)
    if kernel.domain == NONNEGATIVE_ORTHANT:
        w = np.maximum(w, _TINY)
    return w


def subgradient_element(kernel, x, x_next, grad, gamma_next):
    """The element of ``dg(x_next)`` certified by a BPG step from `x`."""
    return (kernel.gradient(x) - kernel.gradient(x_next)) / gamma_next - grad


def inclusion_residual(kernel, problem, x, x_next, grad, gamma_next):
    """Distance from the certified subgradient to ``dg(x_next)``.

    Scaled by ``1 + ||grad f(x)|| + (||grad h(x)|| + ||grad h(x_next)||) / gamma``,
    the magnitude of the terms whose difference forms the subgradient.
    """
    gx, gn = kernel.gradient(x), kernel.gradient(x_next)
    u = (gx - gn) / gamma_next - grad
    scale = 1.0 + np.linalg.norm(grad) + (np.linalg.norm(gx) + np.linalg.norm(gn)) / gamma_next
    return problem.g.subgradient_distance(x_next, u) / scale


def pair_smoothness(kernel, x0, x1, g0, g1):
    """``<g1 - g0, x1 - x0>`` over the symmetrized Bregman distance."""
    dsym = kernel.distance(x1, x0) + kernel.distance(x0, x1)
    if not dsym >= 1e-300:
        raise DegeneratePairError("trial point coincides with the start")
    return float(np.dot(g1 - g0, x1 - x0)) / dsym


class Initialization(NamedTuple):
    gamma0: float
    gamma_minus1: float
    x1: np.ndarray
    ell0: float
    grad0: np.ndarray
    trial_gammas: tuple
    calls: int


def initialize_stepsizes(kernel, problem, x0, gamma_init=None, grad0=None, max_rounds=20):
    """Pick the first stepsize ``gamma0`` and a fictitious predecessor.

    A trial BPG step with `gamma_init` (default ``1 / L`` when the instance
    has a global modulus, else 1) yields a local smoothness estimate
    ``ell0`` and ``gamma0 = 1 / ell0``.  While ``gamma0 < 0.1 gamma_init``
    the trial is repeated from ``gamma_init = gamma0``.  ``gamma_minus1`` is
    the largest value with ``gamma0 sqrt(1 + gamma0 / gamma_minus1) >= 1 / (2 ell0)``
    capped at ``gamma0``.  ``calls`` counts every gradient evaluated here.
    """
    if gamma_init is None:
        L = problem.global_modulus
        gamma_init = 1.0 / L if L else 1.0
    if not gamma_init > 0:
        raise ValueError("gamma_init must be positive")
    calls = 0
    if grad0 is None:
        grad0 = problem.f_gradient(x0)
        calls += 1
    trials = []
    gamma0 = ell0 = None
    for _ in range(max_rounds):
        trials.append(gamma_init)
        x_t = bpg_step(kernel, problem, x0, gamma_init, grad=grad0)
        g_t = problem.f_gradient(x_t)
        calls += 1
        try:
            ell0 = max(pair_smoothness(kernel, x0, x_t, grad0, g_t), 0.0)
        except DegeneratePairError:
            ell0 = 0.0
        gamma0 = 1.0 / ell0 if ell0 > 0 else gamma_init
        if gamma0 >= 0.1 * gamma_init:
            break
        gamma_init = gamma0
    else:
        raise InitializationError(f"no stable initial stepsize after {max_rounds} rounds", gamma0=gamma0)

    if ell0 > 0 and gamma0 < 0.5 / ell0:
        gamma_minus1 = gamma0 / ((0.5 / (ell0 * gamma0)) ** 2 - 1.0)
    else:
        gamma_minus1 = gamma0
    x1 = bpg_step(kernel, problem, x0, gamma0, grad=grad0)
    return Initialization(gamma0, gamma_minus1, x1, ell0, grad0, tuple(trials), calls)
