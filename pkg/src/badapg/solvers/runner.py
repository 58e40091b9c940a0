"""Drive a controller from initialization to a budget or cost target."""

from __future__ import annotations

import math
import time

import numpy as np

from ..errors import ConfigurationError, DegeneratePairError, DomainError, ProxError
from ..estimates import LocalEstimates, make_snapshot
from ..kernels import EuclideanKernel
from .bagraal import GraalState, bagraal_step, require_modulus
from .core import bpg_step, initialize_stepsizes
from .linesearch import bpg_linesearch_step
from .rules import RULES
from .state import GOLDEN, INIT, LINESEARCH, SolverState, TraceRecord, Trajectory

__all__ = ["run", "check_compatibility", "CONTROLLERS"]

CONTROLLERS = ("b-adapg", "b-adapg-alpha", "adapg", "adapg-1-half", "bpg-ls", "bagraal")

_NAN = math.nan
# Coincident iterates carry no curvature information and every curvature
# term of the descent inequality vanishes with them; these neutral values
# put the rules on the growth branch.
DEGENERATE_ESTIMATES = LocalEstimates(ell=0.0, a=1.0, lam=1.0, delta=_NAN, ell_raw=0.0)


def check_compatibility(kernel, problem, controller):
    """Raise `ConfigurationError` for any unusable combination."""
    if controller not in CONTROLLERS:
        raise ConfigurationError(f"unknown controller {controller!r}; expected one of {CONTROLLERS}")
    problem.check_kernel(kernel)
    if controller in ("adapg", "adapg-1-half") and not isinstance(kernel, EuclideanKernel):
        raise ConfigurationError(f"{controller} requires the Euclidean kernel, got {kernel.name}")
    if controller == "b-adapg-alpha":
        alpha = kernel.symmetry_coefficient
        if alpha is None or not alpha > 0:
            raise ConfigurationError(f"b-adapg-alpha needs a positive symmetry coefficient; {kernel.name} has {alpha}")
    if controller == "bagraal":
        require_modulus(kernel)


class _Recorder:
    """Counts oracle calls and appends one `TraceRecord` per call."""

    def __init__(self, traj, problem, t0):
        self.traj = traj
        self.problem = problem
        self.t0 = t0

    def gradient(self, x):
        g = self.problem.f_gradient(x)
        self.traj.oracle_calls += 1
        return g

    def record(self, iteration, cost, gamma, rho_hat=_NAN, est=None, branch=INIT):
        ell, lam, a = (_NAN, _NAN, _NAN) if est is None else (est.ell, est.lam, est.a)
        self.traj.records.append(TraceRecord(
            iter=iteration, oracle_calls=self.traj.oracle_calls, cost=cost, norm_cost=_NAN,
            gamma=gamma, rho_hat=rho_hat, ell=ell, lam=lam, a=a, branch=branch,
            time_s=time.perf_counter() - self.t0, f_evals=self.traj.f_evals,
        ))


def _target_hit(cost, traj, target):
    if target is None or traj.phi_min is None:
        return False
    denom = traj.phi0 - traj.phi_min
    return denom <= 0 or (cost - traj.phi_min) / denom <= target


STALL_RTOL = 2.0**-50


def is_stalled(x, x_next):
    """The step moved `x` by no more than rounding noise."""
    return float(np.linalg.norm(x_next - x)) <= STALL_RTOL * float(np.linalg.norm(x))


def _push(traj, x, grad, gamma, rho_hat, cost, keep):
    traj.xs.append(x)
    traj.grads.append(grad)
    if not keep and len(traj.xs) > 3:
        # x^0 plus the last two iterates
        del traj.xs[1], traj.grads[1]
    if not cost >= traj.best_cost:
        traj.best_cost, traj.x_best = cost, x
    traj.gammas.append(gamma)
    traj.rho_hats.append(rho_hat)
    traj.costs.append(cost)


def run(kernel, problem, controller, x0=None, budget=1000, target=None, phi_min=None, gamma_init=None,
        epsilon=0.0, seed=0, keep_iterates=True):
    """Run `controller` on `problem` under `kernel`.

    Parameters
    ----------
    kernel : Kernel
    problem : ProblemInstance
    controller : str
        One of `CONTROLLERS`.
    x0 : array, optional
        Starting point; defaults to the instance's feasible start.
    budget : int
        Maximum number of gradient evaluations.  Initialization always runs.
    target, phi_min : float, optional
        Stop once ``(phi - phi_min) / (phi0 - phi_min) <= target``.
    gamma_init : float, optional
        Trial stepsize for the initialization.
    epsilon : float
        Growth-cap shrink factor of the adaptive rules.
    seed : int
        Seeds the perturbation used by ``bagraal``.
    keep_iterates : bool
        Store every iterate and gradient.  Otherwise only ``x^0`` and the
        last two are kept.

    Returns
    -------
    Trajectory
    """
    check_compatibility(kernel, problem, controller)
    x0 = np.array(problem.feasible_start if x0 is None else x0, dtype=float)
    if not kernel.in_interior(x0):
        raise DomainError("x0 must lie in the interior of the kernel domain")
    traj = Trajectory(controller=controller, kernel_name=kernel.name, problem_name=problem.name,
                      bpg_iterates=controller != "bagraal")
    traj.phi0 = problem.cost(x0)
    if phi_min is not None:
        traj.phi_min = float(phi_min)
    rec = _Recorder(traj, problem, time.perf_counter())
    if controller == "bagraal":
        _run_bagraal(kernel, problem, x0, budget, target, seed, keep_iterates, traj, rec)
    elif controller == "bpg-ls":
        _run_linesearch(kernel, problem, x0, budget, target, gamma_init, keep_iterates, traj, rec)
    else:
        _run_adaptive(kernel, problem, controller, x0, budget, target, gamma_init, epsilon,
                      keep_iterates, traj, rec)
    if traj.phi_min is not None:
        traj.normalize(traj.phi_min)
    return traj


def _init_records(kernel, problem, x0, gamma_init, traj, rec):
    grad0 = rec.gradient(x0)
    rec.record(0, traj.phi0, _NAN)
    init = initialize_stepsizes(kernel, problem, x0, gamma_init, grad0=grad0)
    for g in init.trial_gammas:
        traj.oracle_calls += 1
        rec.record(0, traj.phi0, g)
    traj.init = init
    return init


def _run_adaptive(kernel, problem, controller, x0, budget, target, gamma_init, epsilon, keep, traj, rec):
    rule = RULES[controller]
    init = _init_records(kernel, problem, x0, gamma_init, traj, rec)
    rho_hat = init.gamma0 / init.gamma_minus1
    _push(traj, x0, init.grad0, init.gamma_minus1, _NAN, traj.phi0, keep)
    traj.decisions.append(None)
    x_cur, gamma_cur = init.x1, init.gamma0
    x_prev, g_prev, gamma_prev = x0, init.grad0, init.gamma_minus1
    if _target_hit(traj.phi0, traj, target):
        traj.stop_reason = "target"
        return
    k = 1
    while traj.oracle_calls < budget:
        g_cur = rec.gradient(x_cur)
        cost = problem.cost(x_cur)
        _push(traj, x_cur, g_cur, gamma_cur, rho_hat, cost, keep)
        snap = make_snapshot(kernel, x_prev, x_cur, g_prev, g_cur, gamma_cur)
        state = SolverState(snap, gamma_prev, rho_hat, iter=k, oracle_calls=traj.oracle_calls)
        try:
            decision = rule(kernel, state, epsilon=epsilon)
        except DegeneratePairError:
            traj.degenerate_pairs += 1
            decision = rule(kernel, state, epsilon=epsilon, estimates=DEGENERATE_ESTIMATES)
        est = decision.estimates
        traj.ell_clamps += bool(est.ell_clamped)
        traj.decisions.append(decision)
        rec.record(k, cost, gamma_cur, rho_hat, est, decision.branch)
        if _target_hit(cost, traj, target):
            traj.stop_reason = "target"
            return
        if not decision.gamma_next > 0:
            traj.stop_reason = "stalled"
            return
        try:
            x_next = bpg_step(kernel, problem, x_cur, decision.gamma_next, grad=g_cur)
        except ProxError as exc:
            exc.diagnostics["iteration"] = k
            raise
        if is_stalled(x_cur, x_next):
            traj.stop_reason = "stalled"
            return
        x_prev, g_prev, gamma_prev = x_cur, g_cur, gamma_cur
        x_cur, gamma_cur, rho_hat = x_next, decision.gamma_next, decision.rho_hat_next
        k += 1
    traj.stop_reason = "budget"


def _run_linesearch(kernel, problem, x0, budget, target, gamma_init, keep, traj, rec):
    init = _init_records(kernel, problem, x0, gamma_init, traj, rec)
    _push(traj, x0, init.grad0, _NAN, _NAN, traj.phi0, keep)
    traj.decisions.append(None)
    if _target_hit(traj.phi0, traj, target):
        traj.stop_reason = "target"
        return
    x, grad, f_x = x0, init.grad0, float(problem.f_value(x0))
    traj.f_evals += 1
    gamma_seed = init.gamma0 / 1.2
    k = 1
    while traj.oracle_calls < budget:
        step = bpg_linesearch_step(kernel, problem, x, grad, f_x, gamma_seed, iteration=k)
        traj.f_evals += step.f_evals
        if is_stalled(x, step.x):
            traj.stop_reason = "stalled"
            return
        x, f_x, gamma_seed = step.x, step.f_value, step.gamma
        grad = rec.gradient(x)
        cost = f_x + problem.g_value(x)
        _push(traj, x, grad, step.gamma, _NAN, cost, keep)
        traj.decisions.append(None)
        rec.record(k, cost, step.gamma, branch=LINESEARCH)
        if _target_hit(cost, traj, target):
            traj.stop_reason = "target"
            return
        k += 1
    traj.stop_reason = "budget"


def _perturbed_start(kernel, x0, seed):
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(x0.shape)
    scale = 1e-6 * max(1.0, float(np.linalg.norm(x0))) / max(float(np.linalg.norm(u)), 1e-300)
    x_bar = x0 + scale * u
    if not kernel.in_interior(x_bar):
        x_bar = x0 + scale * np.abs(u)
    return x_bar


def _run_bagraal(kernel, problem, x0, budget, target, seed, keep, traj, rec):
    g0 = rec.gradient(x0)
    rec.record(0, traj.phi0, _NAN)
    x_bar = _perturbed_start(kernel, x0, seed)
    g_bar = rec.gradient(x_bar)
    L0 = float(np.linalg.norm(g0 - g_bar) / np.linalg.norm(x0 - x_bar))
    gamma0 = 1.0 / L0 if L0 > 0 else 1.0
    rec.record(0, traj.phi0, gamma0, branch=INIT)
    _push(traj, x0, g0, gamma0, _NAN, traj.phi0, keep)
    traj.decisions.append(None)
    if _target_hit(traj.phi0, traj, target):
        traj.stop_reason = "target"
        return
    # the perturbed point plays the role of the predecessor of x0
    state = GraalState(x_bar, x0, g_bar, g0, kernel.gradient(x0), gamma0, 1.0)
    k = 1
    while traj.oracle_calls < budget:
        x_next, gamma_next, eta_bar, theta = bagraal_step(kernel, problem, state)
        g_next = rec.gradient(x_next)
        cost = problem.cost(x_next)
        _push(traj, x_next, g_next, gamma_next, _NAN, cost, keep)
        traj.decisions.append(None)
        rec.record(k, cost, gamma_next, branch=GOLDEN)
        if _target_hit(cost, traj, target):
            traj.stop_reason = "target"
            return
        state = GraalState(state.x_curr, x_next, state.grad_curr, g_next, eta_bar, gamma_next, theta)
        k += 1
    traj.stop_reason = "budget"

