"""Executable invariant checks for kernels, estimates and trajectories.

Every check returns an `InvariantReport` whose ``worst_violation`` is a
scale-normalized residual compared against a fixed ``threshold``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import xlogy

from .errors import DegeneratePairError
from .estimates import (
    bregman_cauchy_schwarz_delta,
    bregman_young_bound,
    curvature_estimate,
    local_estimates,
    make_snapshot,
)
from .kernels import (
    NONNEGATIVE_ORTHANT,
    EntropyKernel,
    EuclideanKernel,
    QuadraticKernel,
    QuarticKernel,
)
from .problems.regularizers import L1Norm, SimplexIndicator, ZeroFunction
from .solvers.core import bpg_step, inclusion_residual
from .solvers.runner import run
from .solvers.state import GOLDEN_RATIO

__all__ = [
    "InvariantReport",
    "sample_points",
    "check_bregman_young",
    "check_duality",
    "check_three_point",
    "check_cauchy_schwarz",
    "check_main_identity",
    "check_merit_descent",
    "check_rate_bound",
    "check_fne_bound",
    "check_ratio_caps",
    "check_prox_inclusion",
    "check_prox_equivalence",
    "check_lambda_limit",
    "check_quadratic_lambda_identity",
    "merit_values",
    "make_regularizer",
    "brute_force_prox",
    "PROX_PAIRINGS",
    "trajectory_checks",
]

MAG_LO, MAG_HI = 1e-3, 1e2


@dataclass
class InvariantReport:
    name: str
    samples: int
    worst_violation: float
    threshold: float
    passed: bool
    context: dict = field(default_factory=dict)
    skipped: int = 0
    applicable: bool = True

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


class _Worst:
    """Tracks the largest normalized violation and its sample."""

    def __init__(self, name, threshold):
        self.name = name
        self.threshold = threshold
        self.value = -math.inf
        self.context = {}
        self.samples = 0
        self.skipped = 0

    def add(self, violation, **context):
        self.samples += 1
        if math.isnan(violation):
            violation = math.inf
        if violation > self.value:
            self.value = violation
            self.context = context

    def report(self):
        worst = max(self.value, 0.0) if self.samples else 0.0
        passed = worst <= self.threshold
        ctx = {} if passed else _jsonable(self.context)
        return InvariantReport(self.name, self.samples, worst, self.threshold, passed, ctx, self.skipped)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _inapplicable(name, threshold, reason):
    return InvariantReport(name, 0, 0.0, threshold, True, {"reason": reason}, applicable=False)


# sampling -------------------------------------------------------------------

def _log_uniform(rng, size, lo=MAG_LO, hi=MAG_HI):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size=size))


def sample_points(kernel, rng, dim=3):
    """Draw ``(x, y, v, delta)`` with log-uniform magnitudes on ``[1e-3, 1e2]``.

    Coordinates carry random signs on full-space kernels and are positive on
    the orthant, where ``y`` is interior by construction.
    """
    x = _log_uniform(rng, dim)
    y = _log_uniform(rng, dim)
    if kernel.domain != NONNEGATIVE_ORTHANT:
        x *= rng.choice([-1.0, 1.0], dim)
        y *= rng.choice([-1.0, 1.0], dim)
    v = _log_uniform(rng, dim) * rng.choice([-1.0, 1.0], dim)
    delta = float(_log_uniform(rng, None))
    return x, y, v, delta


# kernel-level checks --------------------------------------------------------

def check_bregman_young(kernel, n_samples=10_000, seed=0, dim=3, sampler=None):
    """``(D(x, y) + D*(grad h(y) + delta v, grad h(y))) / delta >= <x - y, v>``.

    Violation is ``(<x - y, v> - bound) / (1 + |bound|)``.
    """
    rng = np.random.default_rng(seed)
    sampler = sampler or (lambda: sample_points(kernel, rng, dim))
    w = _Worst("bregman_young", 1e-10)
    for _ in range(n_samples):
        x, y, v, delta = sampler()
        if not kernel.in_interior(y):
            w.skipped += 1
            continue
        with np.errstate(over="ignore", invalid="ignore"):
            bound = bregman_young_bound(kernel, x, y, v, delta)
        inner = float(np.dot(x - y, v))
        if math.isinf(bound) and bound > 0:
            w.add(-math.inf)
            continue
        w.add((inner - bound) / (1.0 + abs(bound)), x=x, y=y, v=v, delta=delta, bound=bound)
    return w.report()


def check_duality(kernel, n_samples=1000, seed=0, dim=3):
    """Conjugate duality of the distances plus the mirror round trip.

    Per sample the worst of three relative residuals:
    ``D(x, y) = D*(grad h(y), grad h(x))``, the Fenchel-Young equality
    ``h(x) + h*(grad h(x)) = <x, grad h(x)>``, and
    ``grad h*(grad h(x)) = x``.
    """
    rng = np.random.default_rng(seed)
    w = _Worst("duality_roundtrip", 1e-10)
    for _ in range(n_samples):
        x, y, _, _ = sample_points(kernel, rng, dim)
        gx, gy = kernel.gradient(x), kernel.gradient(y)
        d = kernel.distance(x, y)
        d_dual = kernel.dual_distance(gy, gx)
        r1 = abs(d - d_dual) / max(abs(d), abs(d_dual), 1e-300)
        hx, hcx, inner = kernel.value(x), kernel.conjugate_value(gx), float(np.dot(x, gx))
        r2 = abs(hx + hcx - inner) / (abs(hx) + abs(hcx) + abs(inner) + 1e-300)
        r3 = float(np.linalg.norm(kernel.mirror_inverse(gx) - x) / np.linalg.norm(x))
        w.add(max(r1, r2, r3), x=x, y=y, distance=r1, fenchel_young=r2, roundtrip=r3)
    return w.report()


def check_three_point(kernel, n_samples=1000, seed=0, dim=3):
    """``D(x, z) = D(x, y) + D(y, z) + <grad h(y) - grad h(z), x - y>``."""
    rng = np.random.default_rng(seed)
    w = _Worst("three_point", 1e-10)
    for _ in range(n_samples):
        x, y, z, _ = sample_points(kernel, rng, dim)
        if kernel.domain == NONNEGATIVE_ORTHANT:
            z = np.abs(z)
        terms = [kernel.distance(x, y), kernel.distance(y, z),
                 float(np.dot(kernel.gradient(y) - kernel.gradient(z), x - y))]
        lhs = kernel.distance(x, z)
        scale = abs(lhs) + sum(abs(t) for t in terms)
        w.add(abs(lhs - sum(terms)) / max(scale, 1e-300), x=x, y=y, z=z)
    return w.report()


def check_cauchy_schwarz(kernel, n_samples=1000, seed=0, dim=3):
    """``<x - y, v> <= ((1 + alpha) / alpha) D(x, y) / delta*`` for ``alpha > 0``."""
    alpha = kernel.symmetry_coefficient
    if alpha is None or not alpha > 0:
        return _inapplicable("cauchy_schwarz", 1e-10, f"{kernel.name} has no positive symmetry coefficient")
    rng = np.random.default_rng(seed)
    w = _Worst("cauchy_schwarz", 1e-10)
    for _ in range(n_samples):
        x, y, v, _ = sample_points(kernel, rng, dim)
        delta = bregman_cauchy_schwarz_delta(kernel, x, y, v)
        if delta is None:
            w.skipped += 1
            continue
        bound = (1.0 + alpha) / alpha * kernel.distance(x, y) / delta
        inner = float(np.dot(x - y, v))
        w.add((inner - bound) / (1.0 + abs(bound)), x=x, y=y, v=v, delta=delta)
    return w.report()


# trajectory checks ----------------------------------------------------------

def _require_bpg(traj, name, threshold):
    if not traj.bpg_iterates:
        return _inapplicable(name, threshold, f"{traj.controller} iterates are not BPG steps")
    if len(traj.xs) != len(traj.costs):
        return _inapplicable(name, threshold, "run did not keep its iterates")
    return None


def _probe_point(kernel, problem, x_ref, rng):
    """A random point of dom(phi) near `x_ref` at a log-uniform relative scale."""
    n = x_ref.size
    if isinstance(problem.g, SimplexIndicator):
        return rng.dirichlet(np.full(n, float(_log_uniform(rng, None, 1.0, 100.0))))
    scale = float(_log_uniform(rng, None)) / MAG_HI
    if kernel.domain == NONNEGATIVE_ORTHANT:
        return x_ref * np.exp(scale * rng.standard_normal(n))
    return x_ref + scale * (1.0 + np.abs(x_ref)) * rng.standard_normal(n)


def main_identity_terms(kernel, problem, traj, k, x, theta):
    """Both sides of the three-iterate identity at iteration ``k >= 1``.

    Returns ``(lhs, rhs, scale)``.  `scale` sums the magnitudes of all
    terms and of the values differenced inside them, the size at which
    rounding enters.
    """
    xm, xk, xp = traj.xs[k - 1], traj.xs[k], traj.xs[k + 1]
    gm, gk = traj.grads[k - 1], traj.grads[k]
    gam_k, gam_p = traj.gammas[k], traj.gammas[k + 1]
    rho_p = gam_p / gam_k
    D = kernel.distance
    phi = problem.cost
    phi_x = phi(x)
    P_k, P_km = traj.costs[k] - phi_x, traj.costs[k - 1] - phi_x

    hm, hk, hp = kernel.gradient(xm), kernel.gradient(xk), kernel.gradient(xp)
    dgrad_g_k = (hm - hk) / gam_k - gm  # certified subgradient of g at x^k
    dgrad_g_p = (hk - hp) / gam_p - gk  # at x^{k+1}
    dgrad_phi_k = dgrad_g_k + gk
    gval = problem.g_value
    g_x, g_k, g_p = gval(x), gval(xk), gval(xp)

    dsym = D(xk, xm) + D(xm, xk)
    fcurv = float(np.dot(gk - gm, xk - xm))
    forward = (hk - hm) - gam_k * (gk - gm)
    B = rho_p * float(np.dot(xp - xk, forward))
    Df = problem.f_value(x) - problem.f_value(xk) - float(np.dot(gk, x - xk))
    Dg_pk = g_p - g_k - float(np.dot(dgrad_g_k, xp - xk))
    Dg_xp = g_x - g_p - float(np.dot(dgrad_g_p, x - xp))
    Dphi_mk = traj.costs[k - 1] - traj.costs[k] - float(np.dot(dgrad_phi_k, xm - xk))

    lhs_terms = [D(x, xp), gam_p * (1.0 + theta) * P_k, D(xp, xk)]
    rhs_terms = [D(x, xk), gam_p * theta * P_km, -rho_p * theta * (dsym - gam_k * fcurv), B,
                 -gam_p * Df, -gam_p * Dg_pk, -gam_p * Dg_xp, -gam_p * theta * Dphi_mk]
    # magnitudes of the quantities differenced inside each term
    nrm = np.linalg.norm
    fx, fk = abs(problem.f_value(x)), abs(problem.f_value(xk))
    mags = [
        abs(phi_x) + abs(traj.costs[k]) + abs(traj.costs[k - 1]),
        fx + fk + abs(float(np.dot(gk, x - xk))),
        abs(g_x) + abs(g_k) + abs(g_p),
        nrm(dgrad_g_k) * nrm(xp - xk) + nrm(dgrad_g_p) * nrm(x - xp) + nrm(dgrad_phi_k) * nrm(xm - xk),
        (nrm(hk) + nrm(hm) + gam_k * (nrm(gk) + nrm(gm))) * nrm(xp - xk),
    ]
    weights = [gam_p * (2.0 + 2.0 * theta), gam_p, gam_p * (2.0 + theta), gam_p * (1.0 + theta), rho_p * (1.0 + theta)]
    scale = sum(abs(t) for t in lhs_terms + rhs_terms) + sum(w * m for w, m in zip(weights, mags))
    return sum(lhs_terms), sum(rhs_terms), scale


def check_main_identity(kernel, problem, traj, n_probes=100, seed=0, max_iter=None, threshold=1e-8):
    """Evaluate both sides of the identity at random ``(k, x, theta)``.

    `n_probes` probes are drawn at every iteration ``1 <= k < K`` (capped by
    `max_iter`).  ``theta`` is zero for a tenth of the probes and
    log-uniform otherwise.
    """
    skip = _require_bpg(traj, "main_identity", threshold)
    if skip:
        return skip
    rng = np.random.default_rng(seed)
    w = _Worst("main_identity", threshold)
    last = len(traj.xs) - 1
    if max_iter is not None:
        last = min(last, max_iter + 1)
    for k in range(1, last):
        for _ in range(n_probes):
            x = _probe_point(kernel, problem, traj.xs[k], rng)
            if not (kernel.in_domain(x) and np.isfinite(problem.cost(x))):
                w.skipped += 1
                continue
            theta = 0.0 if rng.uniform() < 0.1 else float(_log_uniform(rng, None))
            lhs, rhs, scale = main_identity_terms(kernel, problem, traj, k, x, theta)
            w.add(abs(lhs - rhs) / max(scale, 1e-300), k=k, theta=theta, lhs=lhs, rhs=rhs)
    return w.report()


def merit_values(kernel, problem, traj, x_star, alpha=None):
    """Merit sequence ``U_k(x_star)`` for ``k >= 1``.

    Without `alpha` the merit of the local-symmetry rule,
    ``D(x, x^k) + gamma_k (1 + rho_hat_k) P_{k-1} + (1 - rho_k / (2 rho_hat_k)) D(x^k, x^{k-1})``;
    with `alpha` the merit
    ``D(x, x^k) + D(x^k, x^{k-1}) + gamma_k (1 + 2 rho_hat_k / (1 + alpha)) P_{k-1}``.
    """
    phi_star = problem.cost(x_star)
    out = []
    for k in range(1, len(traj.xs)):
        gam, rho_hat = traj.gammas[k], traj.rho_hats[k]
        rho = gam / traj.gammas[k - 1]
        P = traj.costs[k - 1] - phi_star
        d_star = kernel.distance(x_star, traj.xs[k])
        d_step = kernel.distance(traj.xs[k], traj.xs[k - 1])
        if alpha is None:
            u = d_star + gam * (1.0 + rho_hat) * P + (1.0 - rho / (2.0 * rho_hat)) * d_step
        else:
            u = d_star + d_step + gam * (1.0 + 2.0 * rho_hat / (1.0 + alpha)) * P
        out.append(u)
    return np.asarray(out)


def _on_boundary(kernel, x, rtol=1e-10):
    if kernel.domain != NONNEGATIVE_ORTHANT:
        return False
    return bool(np.min(x) <= rtol * max(float(np.max(x)), 1.0))


def check_merit_descent(kernel, problem, traj, x_star, threshold=1e-8):
    """``U_{k+1}(x_star) <= U_k(x_star) + 1e-8 (1 + U_k)`` for the run's controller."""
    name = "merit_descent"
    alpha, skip = _merit_alpha(kernel, traj, name, threshold)
    if skip:
        return skip
    if not kernel.in_interior(x_star) or _on_boundary(kernel, x_star):
        return _inapplicable(name, threshold, "reference point lies on the domain boundary")
    if problem.cost(x_star) > min(traj.costs):
        return _inapplicable(name, threshold, "reference point is not below every iterate")
    U = merit_values(kernel, problem, traj, x_star, alpha)
    w = _Worst(name, threshold)
    for k in range(len(U) - 1):
        w.add((U[k + 1] - U[k]) / (1.0 + abs(U[k])), k=k + 1, U_k=U[k], U_next=U[k + 1])
    return w.report()


def _merit_alpha(kernel, traj, name, threshold):
    """Merit selector shared by the merit-based checks: ``(alpha, skip)``."""
    skip = _require_bpg(traj, name, threshold)
    if skip:
        return None, skip
    if traj.controller == "b-adapg":
        return None, None
    if traj.controller == "b-adapg-alpha":
        return kernel.symmetry_coefficient, None
    return None, _inapplicable(name, threshold, f"no merit function for {traj.controller}")


def check_rate_bound(kernel, problem, traj, x_star, threshold=1e-8):
    """Best-so-far bound ``min_{k<=K} P_k(x_star) <= U_1(x_star) / sum_{k=1}^{K+1} gamma_k``.

    ``U_1`` is the first merit value, which dominates every later one.
    Violation is ``(P_min - bound) / (1 + |bound|)``.
    """
    name = "rate_bound"
    alpha, skip = _merit_alpha(kernel, traj, name, threshold)
    if skip:
        return skip
    if not kernel.in_interior(x_star) or _on_boundary(kernel, x_star):
        return _inapplicable(name, threshold, "reference point lies on the domain boundary")
    phi_star = problem.cost(x_star)
    if phi_star > min(traj.costs):
        return _inapplicable(name, threshold, "reference point is not below every iterate")
    U1 = merit_values(kernel, problem, traj, x_star, alpha)[0]
    P = np.asarray(traj.costs, dtype=float) - phi_star
    p_min = np.minimum.accumulate(P)
    gsum = np.cumsum(np.asarray(traj.gammas[1:], dtype=float))
    w = _Worst(name, threshold)
    for K in range(1, len(traj.xs) - 1):
        bound = U1 / gsum[K]
        w.add((p_min[K] - bound) / (1.0 + abs(bound)), K=K, p_min=p_min[K], bound=bound)
    return w.report()


def check_fne_bound(kernel, traj, threshold=1e-10):
    """``B_{k+1} >= D(x^{k+1}, x^k) + D(x^k, x^{k+1})`` along BPG iterates."""
    skip = _require_bpg(traj, "fne_bound", threshold)
    if skip:
        return skip
    w = _Worst("fne_bound", threshold)
    for k in range(1, len(traj.xs) - 1):
        xm, xk, xp = traj.xs[k - 1], traj.xs[k], traj.xs[k + 1]
        forward = (kernel.gradient(xk) - kernel.gradient(xm)) - traj.gammas[k] * (traj.grads[k] - traj.grads[k - 1])
        rho = traj.gammas[k + 1] / traj.gammas[k]
        dx = xp - xk
        B = rho * float(np.dot(dx, forward))
        dsym = kernel.distance(xp, xk) + kernel.distance(xk, xp)
        mags = (np.linalg.norm(kernel.gradient(xk)) + np.linalg.norm(kernel.gradient(xm))
                + traj.gammas[k] * (np.linalg.norm(traj.grads[k]) + np.linalg.norm(traj.grads[k - 1])))
        scale = dsym + rho * float(np.linalg.norm(dx) * mags)
        if scale == 0:
            w.skipped += 1
            continue
        w.add((dsym - B) / scale, k=k, B=B, dsym=dsym)
    return w.report()


def check_ratio_caps(traj, threshold=1e-12):
    """``rho_hat_k <= golden ratio`` and ``rho_k <= rho_hat_k`` for ``k >= 1``."""
    if traj.controller in ("bpg-ls", "bagraal"):
        return _inapplicable("ratio_caps", threshold, f"{traj.controller} has no ratio overestimate")
    w = _Worst("ratio_caps", threshold)
    rhos = traj.rhos()
    for k in range(1, len(traj.gammas)):
        rho_hat, rho = traj.rho_hats[k], rhos[k - 1]
        w.add(max(rho_hat - GOLDEN_RATIO, rho - rho_hat), k=k, rho=rho, rho_hat=rho_hat)
    for k, dec in enumerate(traj.decisions):
        if dec is not None:
            w.add(max(dec.rho_hat_next - GOLDEN_RATIO, dec.rho_next - dec.rho_hat_next), k=k + 1,
                  rho=dec.rho_next, rho_hat=dec.rho_hat_next)
    return w.report()


def check_prox_inclusion(kernel, problem, traj, threshold=1e-8):
    """Scaled distance of the certified subgradient to ``dg(x^{k+1})``.

    Steps whose output was lifted off the orthant boundary are skipped.
    """
    skip = _require_bpg(traj, "prox_inclusion", threshold)
    if skip:
        return skip
    w = _Worst("prox_inclusion", threshold)
    tiny = np.finfo(float).tiny
    for k in range(len(traj.xs) - 1):
        x_next = traj.xs[k + 1]
        if kernel.domain == NONNEGATIVE_ORTHANT and np.any(x_next <= tiny):
            w.skipped += 1
            continue
        r = inclusion_residual(kernel, problem, traj.xs[k], x_next, traj.grads[k], traj.gammas[k + 1])
        w.add(r, k=k)
    return w.report()


def check_quadratic_lambda_identity(kernel, traj, threshold=1e-9):
    """For ``h = x^T Q x / 2``: ``Lambda = gamma^2 L_k^2 - 2 gamma ell_k + 1``.

    ``L_k = ||dgrad||_{Q^-1} / ||dx||_Q`` and ``ell_k = <dgrad, dx> / ||dx||_Q^2``;
    the residual is relative to ``gamma^2 L_k^2 + 2 gamma |ell_k| + 1``.
    """
    if not isinstance(kernel, (QuadraticKernel, EuclideanKernel)):
        return _inapplicable("quadratic_lambda", threshold, "kernel is not quadratic")
    skip = _require_bpg(traj, "quadratic_lambda", threshold)
    if skip:
        return skip
    Q = kernel.Q if isinstance(kernel, QuadraticKernel) else np.eye(traj.xs[0].size)
    w = _Worst("quadratic_lambda", threshold)
    for k in range(1, len(traj.xs)):
        snap = make_snapshot(kernel, traj.xs[k - 1], traj.xs[k], traj.grads[k - 1], traj.grads[k], traj.gammas[k])
        dx = snap.x_curr - snap.x_prev
        dg = snap.grad_f_curr - snap.grad_f_prev
        nq = float(dx @ Q @ dx)
        if not nq > 0:
            w.skipped += 1
            continue
        L2 = float(dg @ np.linalg.solve(Q, dg)) / nq
        ell = float(dg @ dx) / nq
        gam = snap.gamma_curr
        delta = 2.0 * math.sqrt(1.0 + gam / traj.gammas[k - 1])
        lam = curvature_estimate(kernel, snap, delta)
        ref = gam * gam * L2 - 2.0 * gam * ell + 1.0
        w.add(abs(lam - ref) / (gam * gam * L2 + 2.0 * gam * abs(ell) + 1.0), k=k, lam=lam, ref=ref)
    return w.report()


LAMBDA_FLOOR = 1e-12


def check_lambda_limit(kernel, problem, x_anchor=None, gamma_grid=None, threshold=1e-3, anchor_budget=100):
    """``|Lambda - 1|`` shrinks with the stepsize.

    At every ``gamma`` of the grid the pair is the anchor and its BPG step
    of size ``gamma``, so the pair contracts with ``gamma``.  Without
    `x_anchor` the anchor is the last iterate of a B-adaPG run of
    `anchor_budget` calls, i.e. a point of a converging trajectory.  ``delta`` is
    the local-symmetry rule's value for ``rho_k = 1``.  Passes when the
    deviation at the smallest ``gamma`` is below `threshold` and the
    deviations decrease strictly along the grid, down to `LAMBDA_FLOOR`.
    """
    grid = np.asarray(gamma_grid if gamma_grid is not None else 10.0 ** -np.arange(1, 7), dtype=float)
    grid = np.sort(grid)[::-1]
    if x_anchor is None:
        x_anchor = run(kernel, problem, "b-adapg", budget=anchor_budget, keep_iterates=False).x_final
    x = np.asarray(x_anchor, dtype=float)
    g0 = problem.f_gradient(x)
    delta = 2.0 * math.sqrt(2.0)
    devs = []
    for gam in grid:
        x1 = bpg_step(kernel, problem, x, gam, grad=g0)
        snap = make_snapshot(kernel, x, x1, g0, problem.f_gradient(x1), gam)
        try:
            devs.append(abs(local_estimates(kernel, snap, delta).lam - 1.0))
        except DegeneratePairError:
            # the anchor is a fixed point: no pair to measure
            ctx = {"gamma": float(gam), "reason": "degenerate pair"}
            return InvariantReport("lambda_limit", len(devs), math.inf, threshold, False, ctx)
    devs = np.asarray(devs)
    # deviations at rounding level count as settled rather than increasing
    decreasing = (devs[1:] < devs[:-1]) | (devs[1:] <= LAMBDA_FLOOR)
    passed = devs[-1] <= threshold and bool(np.all(decreasing))
    ctx = {} if passed else {"gamma": grid.tolist(), "deviation": devs.tolist()}
    return InvariantReport("lambda_limit", len(grid), float(devs[-1]), threshold, bool(passed), ctx)


# prox oracle against brute force -------------------------------------------

def _rowwise_kernel_value(kernel, W):
    if isinstance(kernel, EuclideanKernel):
        return 0.5 * np.sum(W * W, axis=1)
    if isinstance(kernel, QuadraticKernel):
        return 0.5 * np.einsum("ij,jk,ik->i", W, kernel.Q, W)
    if isinstance(kernel, QuarticKernel):
        s = np.sum(W * W, axis=1)
        return 0.25 * s * s + 0.5 * s
    if isinstance(kernel, EntropyKernel):
        with np.errstate(invalid="ignore"):
            out = np.sum(xlogy(W, W), axis=1)
        return np.where(np.all(W >= 0, axis=1), out, np.inf)
    raise TypeError(f"no row-wise value for {kernel.name}")


def _rowwise_g(g, W):
    if isinstance(g, ZeroFunction):
        return np.zeros(W.shape[0])
    if isinstance(g, L1Norm):
        return g.lam * np.sum(np.abs(W), axis=1)
    raise TypeError(f"no row-wise value for {g.name}")


def brute_force_prox(kernel, g, y, v, gamma, points=11, rounds=80):
    """Minimize ``<v, w> + g(w) + D(w, y) / gamma`` by grid refinement.

    A ``points^dim`` grid around the incumbent is shrunk by half each round.
    On the simplex the last coordinate is eliminated.
    """
    y = np.asarray(y, dtype=float)
    gy = kernel.gradient(y)
    simplex = isinstance(g, SimplexIndicator)
    n = y.size
    free = n - 1 if simplex else n

    def lift(Z):
        return np.column_stack([Z, 1.0 - Z.sum(axis=1)]) if simplex else Z

    def objective(Z):
        W = lift(Z)
        with np.errstate(invalid="ignore", over="ignore"):
            h = _rowwise_kernel_value(kernel, W)
            val = W @ v + (h - W @ gy) / gamma
            if not simplex:
                val = val + _rowwise_g(g, W)
        if simplex or kernel.domain == NONNEGATIVE_ORTHANT:
            val = np.where(np.all(W >= 0, axis=1), val, np.inf)
        return np.where(np.isnan(val), np.inf, val)

    center = y[:free].copy()
    radius = 4.0 * (1.0 + float(np.max(np.abs(y))) + gamma * float(np.max(np.abs(v))))
    if simplex:
        center, radius = np.full(free, 1.0 / n), 1.0
    ticks = np.linspace(-1.0, 1.0, points)
    mesh = np.stack(np.meshgrid(*([ticks] * free), indexing="ij"), axis=-1).reshape(-1, free)
    for _ in range(rounds):
        Z = center + radius * mesh
        if kernel.domain == NONNEGATIVE_ORTHANT and not simplex:
            Z = np.maximum(Z, 0.0)
        vals = objective(Z)
        center = Z[int(np.argmin(vals))]
        radius *= 0.5
    return lift(center[None, :])[0]


PROX_PAIRINGS = (
    ("euclidean", "zero"),
    ("euclidean", "l1"),
    ("quadratic", "zero"),
    ("quartic", "zero"),
    ("quartic", "l1"),
    ("entropy", "zero"),
    ("entropy", "l1"),
    ("entropy", "simplex"),
)


def make_regularizer(name, lam=0.1):
    """Regularizer for a `PROX_PAIRINGS` name."""
    if name == "zero":
        return ZeroFunction()
    if name == "l1":
        return L1Norm(lam)
    if name == "simplex":
        return SimplexIndicator()
    raise ValueError(f"unknown regularizer {name!r}")


def check_prox_equivalence(kernel, g, n_instances=100, seed=0, max_dim=3, threshold=1e-5):
    """Closed-form Bregman prox against `brute_force_prox` on random data.

    Violation is ``||w_prox - w_brute|| / (1 + ||w_brute||)``.
    """
    rng = np.random.default_rng(seed)
    w = _Worst(f"prox_equivalence[{kernel.name},{g.name}]", threshold)
    for _ in range(n_instances):
        dim = int(rng.integers(2 if isinstance(g, SimplexIndicator) else 1, max_dim + 1))
        kern = kernel
        if isinstance(kernel, QuadraticKernel) and kernel.Q.shape[0] != dim:
            kern = QuadraticKernel.random(dim, seed=int(rng.integers(1 << 31)))
        y = rng.uniform(0.1, 2.0, dim)
        if kern.domain != NONNEGATIVE_ORTHANT:
            y *= rng.choice([-1.0, 1.0], dim)
        v = rng.uniform(-2.0, 2.0, dim)
        gamma = float(_log_uniform(rng, None, 0.05, 2.0))
        w_prox = g.prox_mirror(kern, kern.gradient(y) - gamma * v, gamma)
        w_brute = brute_force_prox(kern, g, y, v, gamma)
        err = float(np.linalg.norm(w_prox - w_brute) / (1.0 + np.linalg.norm(w_brute)))
        w.add(err, y=y, v=v, gamma=gamma, prox=w_prox, brute=w_brute)
    return w.report()


def trajectory_checks(kernel, problem, traj, x_star=None, n_probes=5, seed=0):
    """The invariant battery run on every recorded trajectory."""
    reports = [check_ratio_caps(traj), check_fne_bound(kernel, traj), check_prox_inclusion(kernel, problem, traj)]
    if n_probes:
        reports.append(check_main_identity(kernel, problem, traj, n_probes=n_probes, seed=seed))
    if x_star is not None:
        reports.append(check_merit_descent(kernel, problem, traj, x_star))
        reports.append(check_rate_bound(kernel, problem, traj, x_star))
    return reports
