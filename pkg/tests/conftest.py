import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from badapg.kernels import EntropyKernel, EuclideanKernel, QuadraticKernel, QuarticKernel

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def all_kernels(n=3, seed=0):
    return [EuclideanKernel(), QuadraticKernel.random(n, seed=seed), EntropyKernel(), QuarticKernel()]


@pytest.fixture(params=["euclidean", "quadratic", "entropy", "quartic"])
def kernel(request):
    return {k.name: k for k in all_kernels()}[request.param]


def interior_point(kernel, rng, n=3):
    """A random interior point with magnitudes spread over several decades."""
    mag = np.exp(rng.uniform(np.log(1e-2), np.log(10.0), n))
    if kernel.domain == "nonnegative-orthant":
        return mag
    return mag * rng.choice([-1.0, 1.0], n)


def finite_difference_gradient(f, x, h=1e-6):
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h * max(1.0, abs(x[i]))
        g[i] = (f(x + e) - f(x - e)) / (2 * e[i])
    return g


# acceptance reporting -----------------------------------------------------------

ACCEPTANCE_LINES = {}


class _Criterion:
    def __init__(self, number, title):
        self.number, self.title, self.detail = number, title, ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        line = f"criterion {self.number:>2} [{self.title}]: {status}  {self.detail}".rstrip()
        ACCEPTANCE_LINES[self.number] = line
        print(line)
        return False


@pytest.fixture
def criterion():
    """``with criterion(n, title) as c:`` records one pass/fail line."""
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
