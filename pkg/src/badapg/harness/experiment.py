"""Experiment orchestration: run cells, polish the minimum, export traces."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import BadapgError, LinesearchStall
from ..solvers.linesearch import bpg_linesearch_step
from ..solvers.runner import is_stalled, run
from ..solvers.state import CSV_HEADER, record_row
from ..validation import trajectory_checks

WINDOW_HEADER = ("iter", "gamma", "gamma_L")


@dataclass
class PolishResult:
    phi_min: float
    x_min: np.ndarray
    degraded: bool
    calls: int
    stop_reason: str


POLISH_PATIENCE = 1000


def polish_minimum(kernel, problem, x_start, budget, best_cost=None, gamma_init=None,
                   patience=POLISH_PATIENCE):
    """Refine a reference minimum by linesearch BPG from `x_start`.

    Runs until `budget` gradient calls, a stalled iterate, `patience`
    consecutive calls without a strict decrease of the best cost, or a
    linesearch stall (flagged as ``degraded``).  The returned ``phi_min``
    never exceeds `best_cost` or the cost of `x_start`.
    """
    x = np.array(x_start, dtype=float)
    phi_x = problem.cost(x)
    best_x, best = x, phi_x
    if best_cost is not None and best_cost < best:
        best = float(best_cost)
    if gamma_init is None:
        L = problem.global_modulus
        gamma_init = 1.0 / L if L else 1.0
    gamma = gamma_init / 1.2
    f_x = float(problem.f_value(x))
    degraded, calls, reason = False, 0, "budget"
    last_gain = 0
    while calls < budget:
        grad = problem.f_gradient(x)
        calls += 1
        try:
            step = bpg_linesearch_step(kernel, problem, x, grad, f_x, gamma, iteration=calls)
        except LinesearchStall:
            degraded, reason = True, "linesearch-stall"
            break
        x_new, f_x, gamma = step.x, step.f_value, step.gamma
        cost = f_x + problem.g_value(x_new)
        if cost < best:
            best, best_x, last_gain = cost, x_new, calls
        if is_stalled(x, x_new):
            x, reason = x_new, "stalled"
            break
        x = x_new
        if patience is not None and calls - last_gain >= patience:
            reason = "no-progress"
            break
    return PolishResult(float(best), best_x, degraded, calls, reason)


def _fmt(v):
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_trace_csv(path, records):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for rec in records:
            w.writerow([_fmt(v) for v in record_row(rec)])


def read_trace_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_window_csv(path, traj, modulus, window):
    """Per-iteration stepsizes of the first `window` iterations."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(WINDOW_HEADER if modulus else WINDOW_HEADER[:2])
        for k in range(1, min(window, len(traj.gammas) - 1) + 1):
            g = float(traj.gammas[k])
            w.writerow([k, repr(g)] + ([repr(float(g * modulus))] if modulus else []))


def stepsize_stats(traj, modulus=None, lo=1, hi=None):
    """Mean and median of ``gamma_k`` over ``lo <= k <= hi``, plus ``gamma L``."""
    g = np.asarray(traj.gammas[lo:None if hi is None else hi + 1], dtype=float)
    g = g[np.isfinite(g)]
    if g.size == 0:
        return {}
    out = {"mean_gamma": float(np.mean(g)), "median_gamma": float(np.median(g)), "min_gamma": float(np.min(g))}
    if modulus:
        out["mean_gamma_L"] = float(np.mean(g) * modulus)
    return out


def _cell_name(cfg, seed, controller):
    return f"{cfg.name}_s{seed}_{controller}"


def run_instance(cfg, seed):
    """All controllers on one instance, sharing one polished minimum.

    Returns a list of per-cell summary dicts; files are written under
    ``cfg.output_dir``.
    """
    out_dir = cfg.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    problem = cfg.instance(seed)
    kernel = cfg.kernel_for(problem)
    modulus = problem.global_modulus if kernel is problem.kernel else None
    trajs, cells = {}, []
    for controller in cfg.controllers:
        cell = {"cell": _cell_name(cfg, seed, controller), "controller": controller, "seed": seed,
                "kernel": kernel.name, "problem": cfg.problem_dict(seed)}
        try:
            trajs[controller] = run(kernel, problem, controller, budget=cfg.budget, gamma_init=cfg.gamma_init,
                                    epsilon=cfg.epsilon, seed=seed)
            cell["status"] = "ok"
        except (BadapgError, ArithmeticError, ValueError) as exc:
            cell.update(status="failed", error=f"{type(exc).__name__}: {exc}")
        cells.append(cell)

    if trajs:
        best = min(trajs.values(), key=lambda t: t.best_cost)
        pol = polish_minimum(kernel, problem, best.x_best, int(cfg.polish_factor * max(cfg.budget, 1)),
                             best_cost=best.best_cost, gamma_init=cfg.gamma_init)
        x_star_cost = problem.cost(pol.x_min)
    for cell in cells:
        traj = trajs.get(cell["controller"])
        if traj is None:
            continue
        traj.normalize(pol.phi_min)
        path = out_dir / f"{cell['cell']}.csv"
        write_trace_csv(path, traj.records)
        write_window_csv(out_dir / f"{cell['cell']}_window.csv", traj, modulus, cfg.window)
        reports = trajectory_checks(kernel, problem, traj,
                                    x_star=pol.x_min if x_star_cost <= traj.best_cost else None,
                                    n_probes=cfg.check_probes, seed=seed)
        checks = {r.name: r.to_dict() for r in reports}
        if not all(r.passed for r in reports):
            cell["status"] = "failed"
            cell["error"] = "invariant check failed: " + ", ".join(r.name for r in reports if not r.passed)
        final = [r.norm_cost for r in traj.records if r.iter > 0] or [traj.records[-1].norm_cost]
        cell.update(
            trace=path.name,
            phi_min=pol.phi_min,
            polish_degraded=pol.degraded,
            final_norm_cost=float(final[-1]),
            best_norm_cost=float(min(final)),
            oracle_calls=traj.oracle_calls,
            f_evals=traj.f_evals,
            calls_to_target=None if cfg.target is None else traj.calls_to_target(cfg.target),
            stop_reason=traj.stop_reason,
            ell_clamps=traj.ell_clamps,
            degenerate_pairs=traj.degenerate_pairs,
            checks=checks,
            **stepsize_stats(traj, modulus),
        )
        if modulus:
            window = stepsize_stats(traj, modulus, lo=50, hi=250)
            if window:
                cell["mean_gamma_L_50_250"] = window["mean_gamma_L"]
        sidecar = dict(cell, best_cost=traj.best_cost, x_best=[float(v) for v in traj.x_best],
                       x_min=[float(v) for v in pol.x_min])
        (out_dir / f"{cell['cell']}.json").write_text(json.dumps(_clean(sidecar), indent=2, default=_json_default))
    return cells


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(type(obj).__name__)


def _clean(obj):
    """Replace non-finite floats so the summary stays strict JSON."""
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def _instance_job(args):
    cfg, seed = args
    try:
        return run_instance(cfg, seed)
    except Exception as exc:  # isolate any failure to its instance
        return [{"cell": _cell_name(cfg, seed, c), "controller": c, "seed": seed, "status": "failed",
                 "error": f"{type(exc).__name__}: {exc}"} for c in cfg.controllers]


def run_experiment(cfg, workers=1):
    """Run every (controller, seed) cell and write ``summary.json``.

    Instances run in parallel across `workers` processes; the summary is
    written once all have finished.
    """
    jobs = [(cfg, seed) for seed in cfg.seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_instance_job, jobs))
    else:
        results = [_instance_job(j) for j in jobs]
    cells = [c for group in results for c in group]
    summary = {"name": cfg.name, "family": cfg.family, "budget": cfg.budget, "target": cfg.target,
               "cells": cells, "passed": all(c.get("status") == "ok" for c in cells)}
    out_dir = cfg.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "summary.json").write_text(json.dumps(_clean(summary), indent=2, default=_json_default))
    return summary
