"""Adaptive stepsize rules.

Each rule maps a `SolverState` at iteration ``k`` to the next stepsize
``gamma_{k+1} = rho_{k+1} gamma_k``.  The ratio ``rho_{k+1}`` is the minimum
of a growth cap ``rho_hat_{k+1}`` and a curvature term driven by
``[lambda - (1 - gamma_k ell)]_+``; a zero bracket leaves only the cap.
"""

from __future__ import annotations

import math

from ..errors import ConfigurationError
from ..estimates import local_estimates
from ..kernels import EuclideanKernel
from .state import CURVATURE, GROWTH, StepsizeDecision

__all__ = [
    "badapg_stepsize",
    "badapg_alpha_stepsize",
    "adapg_stepsize",
    "adapg_1half_stepsize",
    "curvature_bracket",
    "RULES",
]


def curvature_bracket(estimates, gamma):
    """``[lambda - (1 - gamma ell)]_+``."""
    return max(estimates.lam - (1.0 - gamma * estimates.ell), 0.0)


def _check_epsilon(epsilon):
    if not 0.0 <= epsilon < 1.0:
        raise ConfigurationError(f"epsilon must lie in [0, 1), got {epsilon}")


def _decide(state, rho_hat, cap_term, estimates, epsilon):
    """Combine the growth cap with a curvature term ``cap_term(bracket)``."""
    bracket = curvature_bracket(estimates, state.gamma_curr)
    first = (1.0 - epsilon) * rho_hat
    if bracket == 0.0:
        rho, branch = first, GROWTH
    else:
        rho, branch = min(first, cap_term(bracket)), CURVATURE
    return StepsizeDecision(
        gamma_next=rho * state.gamma_curr,
        rho_next=rho,
        rho_hat_next=rho_hat,
        estimates=estimates,
        branch=branch,
    )


def badapg_stepsize(kernel, state, epsilon=0.0, estimates=None):
    """Bregman adaptive rule for arbitrary Legendre kernels.

    ``rho_hat = sqrt(1 + rho_k)`` and ``delta = 2 rho_hat``; the curvature
    term ``(a / (1 + a)) / (2 rho_hat bracket)`` uses the local symmetry
    ``a`` in place of a global symmetry coefficient.

    Parameters
    ----------
    kernel : Kernel
    state : SolverState
    epsilon : float, optional
        Shrinks the growth cap to ``(1 - epsilon) rho_hat``.
    estimates : LocalEstimates, optional
        Precomputed estimates, e.g. frozen ones after a degenerate pair.
    """
    _check_epsilon(epsilon)
    rho_hat = math.sqrt(1.0 + state.rho_curr)
    if estimates is None:
        estimates = local_estimates(kernel, state.snap, 2.0 * rho_hat)
    a = estimates.a
    return _decide(state, rho_hat, lambda br: (a / (1.0 + a)) / (2.0 * rho_hat * br), estimates, epsilon)


def badapg_alpha_stepsize(kernel, state, alpha=None, epsilon=0.0, estimates=None):
    """Variant driven by a global symmetry coefficient ``alpha > 0``.

    ``rho_hat = sqrt((1 + alpha) / 2 + rho_k)``, ``delta = 2 rho_hat / (1 + alpha)``
    and the curvature term is ``alpha / (2 rho_hat bracket)``.  `alpha`
    defaults to the kernel's own coefficient.
    """
    _check_epsilon(epsilon)
    if alpha is None:
        alpha = kernel.symmetry_coefficient
    if alpha is None or not alpha > 0:
        raise ConfigurationError(f"{kernel.name} kernel has no positive symmetry coefficient")
    rho_hat = math.sqrt(0.5 * (1.0 + alpha) + state.rho_curr)
    if estimates is None:
        estimates = local_estimates(kernel, state.snap, 2.0 * rho_hat / (1.0 + alpha))
    return _decide(state, rho_hat, lambda br: alpha / (2.0 * rho_hat * br), estimates, epsilon)


def _require_euclidean(kernel, rule):
    if not isinstance(kernel, EuclideanKernel):
        raise ConfigurationError(f"{rule} is defined for the Euclidean kernel only, got {kernel.name}")


def adapg_stepsize(kernel, state, epsilon=0.0, estimates=None):
    """Euclidean baseline: ``min{rho_hat, 1 / (2 sqrt(bracket))}``."""
    _require_euclidean(kernel, "adapg")
    _check_epsilon(epsilon)
    rho_hat = math.sqrt(1.0 + state.rho_curr)
    if estimates is None:
        estimates = local_estimates(kernel, state.snap, 2.0 * rho_hat)
    return _decide(state, rho_hat, lambda br: 0.5 / math.sqrt(br), estimates, epsilon)


def adapg_1half_stepsize(kernel, state, epsilon=0.0, estimates=None):
    """Euclidean baseline: ``min{sqrt(1 + rho), 1 / sqrt(2 bracket)}``."""
    _require_euclidean(kernel, "adapg-1-half")
    _check_epsilon(epsilon)
    rho_hat = math.sqrt(1.0 + state.rho_curr)
    if estimates is None:
        estimates = local_estimates(kernel, state.snap, rho_hat)
    return _decide(state, rho_hat, lambda br: 1.0 / math.sqrt(2.0 * br), estimates, epsilon)


RULES = {
    "b-adapg": badapg_stepsize,
    "b-adapg-alpha": badapg_alpha_stepsize,
    "adapg": adapg_stepsize,
    "adapg-1-half": adapg_1half_stepsize,
}
