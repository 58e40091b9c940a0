"""Safeguarded Newton iteration for monotone scalar equations."""

from __future__ import annotations

import math

from .errors import NumericalError


def safeguarded_newton(fun, dfun, lo, hi, x0=None, xtol=1e-14, maxiter=200):
    """Find the root of an increasing function on ``[lo, hi]``.

    Newton steps that leave the current bracket are replaced by bisection,
    so convergence is global whenever ``fun(lo) <= 0 <= fun(hi)``.
    `xtol` is relative to ``max(1, |x|)``.
    """
    flo, fhi = fun(lo), fun(hi)
    if flo > 0 or fhi < 0:
        raise NumericalError(
            "root is not bracketed",
            {"lo": lo, "hi": hi, "f(lo)": flo, "f(hi)": fhi},
        )
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    x = 0.5 * (lo + hi) if x0 is None else min(max(x0, lo), hi)
    for _ in range(maxiter):
        fx = fun(x)
        if fx == 0:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        d = dfun(x)
        step = fx / d if d > 0 else math.inf
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= xtol * max(1.0, abs(x_new)) or hi - lo <= xtol * max(1.0, abs(hi)):
            return x_new
        x = x_new
    raise NumericalError(
        "safeguarded Newton did not converge",
        {"lo": lo, "hi": hi, "x": x, "maxiter": maxiter},
    )


def cubic_norm_root(c):
    """Unique ``t >= 0`` with ``t**3 + t = c`` for ``c >= 0``.

    Newton started at the upper bound ``min(c, c**(1/3))`` decreases
    monotonically onto the root (the map is convex and increasing); the
    bracket ``[0, min(c, c**(1/3))]`` guards against round-off.
    """
    if c < 0:
        raise ValueError("c must be nonnegative")
    if c == 0:
        return 0.0
    hi = min(c, c ** (1.0 / 3.0))

    def fun(t):
        return t * (t * t + 1.0) - c

    # the rounded cube root can land just below the root
    while fun(hi) < 0:
        hi *= 1.0 + 2.0**-50
    return safeguarded_newton(
        fun,
        lambda t: 3.0 * t * t + 1.0,
        0.0,
        hi,
        x0=hi,
    )
