"""Command-line entry point.

::

    badapg solve --config run.ini
    badapg bench --config bench.ini --workers 4
    badapg validate --kernel quartic --samples 10000
    badapg polish --trace results/poly/poly_s0_b-adapg.csv

Every subcommand exits with status 0 iff all of its cells or checks pass.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import BadapgError
from ..kernels import KERNEL_NAMES, make_kernel
from ..problems import (
    kl_regression_instance,
    least_squares_instance,
    make_instance,
    poly_hessian_instance,
)
from .. import validation
from .config import load_config
from .experiment import _clean, polish_minimum, run_experiment


def _print_json(obj, stream=None):
    (stream or sys.stdout).write(json.dumps(_clean(obj), default=str) + "\n")


def _summarize(summary):
    lines = []
    for c in summary["cells"]:
        if c.get("status") == "ok":
            lines.append(f"{c['cell']}: ok  calls={c.get('oracle_calls')}  to_target={c.get('calls_to_target')}"
                         f"  final_norm_cost={c.get('final_norm_cost'):.3e}")
        else:
            lines.append(f"{c['cell']}: FAILED  {c.get('error', '')}")
    return "\n".join(lines)


def cmd_solve(args, workers=1):
    cfg = load_config(args.config)
    summary = run_experiment(cfg, workers=workers)
    print(_summarize(summary))
    print(f"summary: {cfg.output_dir / 'summary.json'}")
    return 0 if summary["passed"] else 1


def cmd_bench(args):
    return cmd_solve(args, workers=args.workers)


def reference_problem(kernel, seed=0):
    """A small instance whose structure suits `kernel`."""
    if kernel.name == "quartic":
        return poly_hessian_instance(40, 20, seed=seed, kernel=kernel)
    if kernel.name == "entropy":
        return kl_regression_instance(40, 20, seed=seed)
    n = kernel.Q.shape[0] if kernel.name == "quadratic" else 20
    return least_squares_instance(40, n, seed=seed, kernel=kernel)


def kernel_reports(kernel_name, samples, seed=0):
    """The kernel-level check battery behind ``validate``."""
    kernel = make_kernel(kernel_name, n=3, seed=seed)
    reports = [
        validation.check_bregman_young(kernel, samples, seed=seed),
        validation.check_duality(kernel, min(samples, 1000), seed=seed),
        validation.check_three_point(kernel, min(samples, 1000), seed=seed),
        validation.check_cauchy_schwarz(kernel, min(samples, 1000), seed=seed),
    ]
    for kname, gname in validation.PROX_PAIRINGS:
        if kname == kernel_name:
            g = validation.make_regularizer(gname)
            reports.append(validation.check_prox_equivalence(kernel, g, min(samples, 100), seed=seed))
    big = make_kernel(kernel_name, n=20, seed=seed)
    reports.append(validation.check_lambda_limit(big, reference_problem(big, seed)))
    return reports


def cmd_validate(args):
    reports = kernel_reports(args.kernel, args.samples, seed=args.seed)
    for r in reports:
        _print_json(r.to_dict())
    return 0 if all(r.passed for r in reports) else 1


def cmd_polish(args):
    trace = Path(args.trace)
    sidecar = trace.with_suffix(".json")
    try:
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise BadapgError(f"cannot read sidecar {sidecar}: {exc}") from None
    spec = meta["problem"]
    problem = make_instance(spec["family"], spec["m"], spec["n"], seed=spec["seed"], lam=spec.get("lambda"),
                            kernel=spec.get("kernel"), noise_scale=spec.get("noise_scale", 0.1),
                            dataset=spec.get("dataset"))
    kernel = problem.kernel
    budget = args.budget or 10 * int(meta.get("oracle_calls") or 1000)
    recorded = [v for v in (meta.get("best_cost"), meta.get("phi_min")) if isinstance(v, (int, float))]
    start = meta.get("x_min") or meta["x_best"]
    result = polish_minimum(kernel, problem, start, budget, best_cost=min(recorded) if recorded else None)
    _print_json({"trace": str(trace), "phi_min": result.phi_min, "previous_phi_min": meta.get("phi_min"),
                 "degraded": result.degraded, "calls": result.calls, "stop_reason": result.stop_reason})
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="badapg", description="Adaptive Bregman proximal gradient experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", help="run the cells of one config sequentially")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("bench", help="run the cells of one config in parallel")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    p = sub.add_parser("validate", help="run the kernel invariant checks")
    p.add_argument("--kernel", required=True, choices=KERNEL_NAMES)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("polish", help="re-polish the reference minimum of a recorded trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_polish)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BadapgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
