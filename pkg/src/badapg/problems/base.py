"""Composite problem container ``phi = f + g``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import ConfigurationError, DomainError
from ..kernels import Kernel
from .regularizers import Regularizer


@dataclass(frozen=True)
class ProblemInstance:
    """Smooth part ``f`` (value and gradient), nonsmooth part ``g``, and the
    kernel the instance is designed for.

    `global_modulus` is the relative smoothness constant of ``f`` with
    respect to `kernel`, when one is known.
    """

    name: str
    f_value: Callable[[np.ndarray], float]
    f_gradient: Callable[[np.ndarray], np.ndarray]
    g: Regularizer
    kernel: Kernel
    feasible_start: np.ndarray
    global_modulus: float | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def dimension(self):
        return int(np.size(self.feasible_start))

    def g_value(self, x):
        return self.g.value(x)

    def cost(self, x):
        """``phi(x) = f(x) + g(x)``; ``inf`` outside the domain."""
        if not self.kernel.in_domain(x):
            return float("inf")
        gv = self.g.value(x)
        if not np.isfinite(gv):
            return float(gv)
        try:
            return float(self.f_value(x)) + gv
        except DomainError:
            return float("inf")

    def prox_mirror(self, kernel, eta, gamma):
        return self.g.prox_mirror(kernel, eta, gamma)

    def prox(self, y, v, gamma, kernel=None):
        """``argmin_w <v, w> + g(w) + D(w, y) / gamma`` for interior `y`."""
        kernel = self.kernel if kernel is None else kernel
        if not kernel.in_interior(y):
            raise DomainError("prox center must be interior")
        return self.g.prox_mirror(kernel, kernel.gradient(y) - gamma * np.asarray(v), gamma)

    def check_kernel(self, kernel):
        """Raise `ConfigurationError` unless `g` has a prox for `kernel` and the
        domains agree."""
        if kernel.domain != self.kernel.domain:
            raise ConfigurationError(
                f"{self.name} is posed on {self.kernel.domain}; kernel {kernel.name} "
                f"has domain {kernel.domain}"
            )
        if not self.g.supports(kernel, self.dimension):
            raise ConfigurationError(f"{self.name}: g={self.g.name} has no prox for {kernel.name}")
