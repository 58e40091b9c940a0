import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from badapg.errors import NumericalError
from badapg.roots import cubic_norm_root, safeguarded_newton


def test_newton_square_root():
    r = safeguarded_newton(lambda t: t * t - 2.0, lambda t: 2.0 * t, 0.0, 2.0)
    assert r == pytest.approx(math.sqrt(2.0), rel=1e-14)


def test_newton_requires_bracket():
    with pytest.raises(NumericalError):
        safeguarded_newton(lambda t: t - 5.0, lambda t: 1.0, 0.0, 1.0)


def test_newton_survives_zero_derivative():
    # t^3 has a vanishing derivative at the root; bisection takes over
    r = safeguarded_newton(lambda t: t**3, lambda t: 3 * t * t, -1.0, 2.0)
    assert abs(r) < 1e-4


def test_cubic_root_edge_cases():
    assert cubic_norm_root(0.0) == 0.0
    assert cubic_norm_root(2.0) == pytest.approx(1.0, rel=1e-15)
    assert cubic_norm_root(10.0) == pytest.approx(2.0, rel=1e-15)
    with pytest.raises(ValueError):
        cubic_norm_root(-1.0)


@given(st.floats(min_value=1e-300, max_value=1e300))
def test_cubic_root_residual(c):
    t = cubic_norm_root(c)
    assert t >= 0
    assert t * (t * t + 1.0) == pytest.approx(c, rel=1e-13)
