"""Bregman proximal gradient with a backtracking linesearch."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..errors import LinesearchStall
from .core import bpg_step

GROW = 1.2
SHRINK = 0.5
GAMMA_FLOOR = 1e-16


class LinesearchResult(NamedTuple):
    x: np.ndarray
    gamma: float
    f_value: float
    f_evals: int


def descent_certificate(kernel, f_x, grad, x, x_plus, f_plus, gamma):
    """Relative-smoothness upper model at `x_plus` dominates ``f(x_plus)``."""
    model = f_x + float(np.dot(grad, x_plus - x)) + kernel.distance(x_plus, x) / gamma
    return f_plus <= model + 1e-12 * (1.0 + abs(f_x))


def bpg_linesearch_step(kernel, problem, x, grad, f_x, gamma_prev, iteration=0):
    """One linesearch step warm-started at ``1.2 * gamma_prev``.

    The stepsize is halved until the descent certificate holds.  Every
    trial costs one value evaluation of ``f``; gradients are not evaluated.

    Raises
    ------
    LinesearchStall
        When the trial stepsize drops below ``1e-16``.
    """
    gamma = GROW * gamma_prev
    evals = 0
    while gamma >= GAMMA_FLOOR:
        x_plus = bpg_step(kernel, problem, x, gamma, grad=grad)
        f_plus = float(problem.f_value(x_plus))
        evals += 1
        if np.isfinite(f_plus) and descent_certificate(kernel, f_x, grad, x, x_plus, f_plus, gamma):
            return LinesearchResult(x_plus, gamma, f_plus, evals)
        gamma *= SHRINK
    raise LinesearchStall(f"stepsize fell below {GAMMA_FLOOR}", gamma=gamma, iteration=iteration)
