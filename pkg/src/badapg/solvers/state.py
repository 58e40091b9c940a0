"""Solver state, stepsize decisions and per-oracle-call telemetry."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..estimates import IterPairSnapshot, LocalEstimates

GROWTH = "unconstrained-growth"
CURVATURE = "curvature-limited"
INIT = "init"
LINESEARCH = "linesearch"
GOLDEN = "golden-ratio"

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class SolverState:
    """What an adaptive rule sees at iteration ``k``.

    ``snap`` holds ``x^{k-1}``, ``x^k`` and ``gamma_k``; ``gamma_prev`` is
    ``gamma_{k-1}`` and ``rho_hat_curr`` the current ratio overestimate.
    """

    snap: IterPairSnapshot
    gamma_prev: float
    rho_hat_curr: float
    iter: int = 0
    oracle_calls: int = 0

    @property
    def gamma_curr(self):
        return self.snap.gamma_curr

    @property
    def rho_curr(self):
        return self.snap.gamma_curr / self.gamma_prev


@dataclass(frozen=True)
class StepsizeDecision:
    gamma_next: float
    rho_next: float
    rho_hat_next: float
    estimates: LocalEstimates
    branch: str


@dataclass
class TraceRecord:
    """One row of telemetry per gradient (oracle) evaluation."""

    iter: int
    oracle_calls: int
    cost: float
    norm_cost: float
    gamma: float
    rho_hat: float
    ell: float
    lam: float
    a: float
    branch: str
    time_s: float
    f_evals: int = 0


CSV_HEADER = ("iter", "oracle_calls", "cost", "norm_cost", "gamma", "rho_hat", "ell", "lambda", "a",
              "branch", "time_s")


def record_row(rec):
    return (rec.iter, rec.oracle_calls, rec.cost, rec.norm_cost, rec.gamma, rec.rho_hat, rec.ell,
            rec.lam, rec.a, rec.branch, rec.time_s)


@dataclass
class Trajectory:
    """Everything a run produces.

    Index conventions follow the iteration: ``xs[k]`` is ``x^k`` and
    ``gammas[k]`` the stepsize that produced it from ``x^{k-1}``, so
    ``gammas[0]`` is the fictitious prior stepsize of the initialization.
    ``decisions[k]`` holds the rule output computed at ``x^k``.
    """

    controller: str
    kernel_name: str
    problem_name: str
    records: list = field(default_factory=list)
    xs: list = field(default_factory=list)
    grads: list = field(default_factory=list)
    gammas: list = field(default_factory=list)
    rho_hats: list = field(default_factory=list)
    decisions: list = field(default_factory=list)
    costs: list = field(default_factory=list)
    oracle_calls: int = 0
    f_evals: int = 0
    ell_clamps: int = 0
    degenerate_pairs: int = 0
    bpg_iterates: bool = True
    stop_reason: str = ""
    phi0: float = math.nan
    phi_min: float | None = None
    init: object = None
    best_cost: float = math.inf
    x_best: np.ndarray | None = None

    @property
    def n_iterates(self):
        return len(self.costs)

    @property
    def best_index(self):
        return int(np.argmin(self.costs))

    @property
    def x_final(self):
        return self.xs[-1]

    def rhos(self):
        """``rho_k = gamma_k / gamma_{k-1}`` for ``k >= 1``."""
        g = np.asarray(self.gammas, dtype=float)
        return g[1:] / g[:-1]

    def normalize(self, phi_min):
        """Fill in ``norm_cost`` on every record from a reference minimum."""
        self.phi_min = float(phi_min)
        denom = self.phi0 - self.phi_min
        for rec in self.records:
            rec.norm_cost = (rec.cost - self.phi_min) / denom if denom > 0 else 0.0

    def calls_to_target(self, target):
        """First oracle-call count whose normalized cost is ``<= target``."""
        for rec in self.records:
            if rec.norm_cost <= target:
                return rec.oracle_calls
        return None
