"""Bregman adaptive golden-ratio algorithm.

The extrapolation point is kept in mirror coordinates,
``eta_bar <- ((nu - 1) grad h(x) + eta_bar) / nu``, and each proximal step
is taken from it: ``x+ = prox(eta_bar - gamma+ grad f(x))``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..errors import ConfigurationError
from ..kernels import NONNEGATIVE_ORTHANT

NU = 1.5
RHO_BAR = 1.0 / NU + 1.0 / NU**2
GAMMA_MAX = 1e6

_TINY = np.finfo(float).tiny


class GraalState(NamedTuple):
    x_prev: np.ndarray
    x_curr: np.ndarray
    grad_prev: np.ndarray
    grad_curr: np.ndarray
    eta_bar: np.ndarray
    gamma_curr: float
    theta_curr: float


def require_modulus(kernel):
    sigma = kernel.strong_convexity_modulus
    if sigma is None or not sigma > 0:
        raise ConfigurationError(f"bagraal needs a strongly convex kernel; {kernel.name} has no modulus")
    return sigma


def bagraal_stepsize(sigma, state, nu=NU, rho_bar=RHO_BAR, gamma_max=GAMMA_MAX):
    """``min{rho_bar gamma, sigma nu theta ||dx||^2 / (4 gamma ||dgrad||^2), gamma_max}``."""
    dx = state.x_curr - state.x_prev
    dg = state.grad_curr - state.grad_prev
    dg2 = float(np.dot(dg, dg))
    local = np.inf
    if dg2 > 0:
        local = sigma * nu * state.theta_curr * float(np.dot(dx, dx)) / (4.0 * state.gamma_curr * dg2)
    return min(rho_bar * state.gamma_curr, local, gamma_max)


def bagraal_step(kernel, problem, state, nu=NU, rho_bar=RHO_BAR, gamma_max=GAMMA_MAX):
    """Advance one golden-ratio iteration.

    Returns the new point, its stepsize and the updated ``eta_bar`` and
    ``theta = nu gamma+ / gamma``.  The caller evaluates the gradient.
    """
    sigma = require_modulus(kernel)
    gamma_next = bagraal_stepsize(sigma, state, nu, rho_bar, gamma_max)
    eta_bar = ((nu - 1.0) * kernel.gradient(state.x_curr) + state.eta_bar) / nu
    x_next = problem.prox_mirror(kernel, eta_bar - gamma_next * state.grad_curr, gamma_next)
    if kernel.domain == NONNEGATIVE_ORTHANT:
        x_next = np.maximum(x_next, _TINY)
    theta_next = nu * gamma_next / state.gamma_curr
    return x_next, gamma_next, eta_bar, theta_next
