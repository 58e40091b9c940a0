"""Experiment configuration read from INI files.

Example::

    [problem]
    family = poly
    m = 100
    n = 50
    seeds = 0, 1, 2
    kernel = quartic

    [run]
    controllers = b-adapg, b-adapg-alpha, bpg-ls
    budget = 10000
    target = 1e-6

    [output]
    name = poly
    root = results

A relative ``root`` is resolved against ``$BADAPG_OUTPUT`` when that
variable is set, else against the working directory.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigurationError
from ..kernels import KERNEL_NAMES, make_kernel
from ..problems import FAMILIES, make_instance
from ..solvers.runner import CONTROLLERS, check_compatibility

OUTPUT_ENV = "BADAPG_OUTPUT"

_KNOWN = {
    "problem": {"family", "m", "n", "seed", "seeds", "lambda", "kernel", "dataset", "noise_scale"},
    "run": {"controllers", "controller", "budget", "target", "epsilon", "gamma_init", "polish_factor",
            "check_probes"},
    "output": {"root", "name", "window"},
}


def _list(text):
    return tuple(t.strip() for t in text.replace("\n", ",").split(",") if t.strip())


@dataclass(frozen=True)
class RunConfig:
    family: str
    m: int
    n: int
    seeds: tuple = (0,)
    lam: float | None = None
    kernel: str | None = None
    dataset: str | None = None
    noise_scale: float = 0.1
    controllers: tuple = ("b-adapg",)
    budget: int = 10_000
    target: float | None = 1e-6
    epsilon: float = 0.0
    gamma_init: float | None = None
    polish_factor: float = 10.0
    check_probes: int = 0
    name: str = "experiment"
    root: Path = field(default_factory=lambda: Path("results"))
    window: int = 200

    @property
    def output_dir(self):
        return resolve_output_root(self.root) / self.name

    def instance(self, seed):
        return make_instance(self.family, self.m, self.n, seed=seed, lam=self.lam, kernel=self.kernel,
                             noise_scale=self.noise_scale, dataset=self.dataset)

    def kernel_for(self, problem):
        if self.kernel is None or self.kernel == problem.kernel.name:
            return problem.kernel
        return make_kernel(self.kernel, n=problem.dimension, seed=0)

    def problem_dict(self, seed):
        return {"family": self.family, "m": self.m, "n": self.n, "seed": seed, "lambda": self.lam,
                "kernel": self.kernel, "dataset": self.dataset, "noise_scale": self.noise_scale}

    def validate(self):
        """Build the first instance and check every controller against it."""
        problem = self.instance(self.seeds[0])
        kernel = self.kernel_for(problem)
        for c in self.controllers:
            check_compatibility(kernel, problem, c)


def resolve_output_root(root):
    root = Path(root)
    if root.is_absolute():
        return root
    base = os.environ.get(OUTPUT_ENV)
    return Path(base) / root if base else root


def _get(section, key, conv, default):
    if key not in section or section[key].strip() == "":
        return default
    raw = section[key].strip()
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigurationError(f"[{section.name}] {key} = {raw!r}: {exc}") from None


def parse_config(text, source="<string>"):
    """Parse INI `text` into a validated `RunConfig`."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigurationError(str(exc)) from None
    for sec in cp.sections():
        if sec not in _KNOWN:
            raise ConfigurationError(f"unknown section [{sec}]")
        unknown = set(cp[sec]) - _KNOWN[sec]
        if unknown:
            raise ConfigurationError(f"unknown keys in [{sec}]: {sorted(unknown)}")
    if "problem" not in cp:
        raise ConfigurationError("missing [problem] section")
    p = cp["problem"]
    r = cp["run"] if "run" in cp else cp["DEFAULT"]
    o = cp["output"] if "output" in cp else cp["DEFAULT"]

    family = _get(p, "family", str, None)
    if family is None or family.lower() not in FAMILIES:
        raise ConfigurationError(f"[problem] family must be one of {FAMILIES}")
    if "seeds" in p:
        seeds = tuple(int(s) for s in _list(p["seeds"]))
    else:
        seeds = (_get(p, "seed", int, 0),)
    kernel = _get(p, "kernel", str, None)
    if kernel is not None and kernel not in KERNEL_NAMES:
        raise ConfigurationError(f"[problem] kernel must be one of {KERNEL_NAMES}")
    controllers = _list(_get(r, "controllers", str, "") or _get(r, "controller", str, "b-adapg"))
    for c in controllers:
        if c not in CONTROLLERS:
            raise ConfigurationError(f"unknown controller {c!r}; expected one of {CONTROLLERS}")
    target = _get(r, "target", str, "1e-6")
    cfg = RunConfig(
        family=family.lower(),
        m=_get(p, "m", int, 0),
        n=_get(p, "n", int, 0),
        seeds=seeds,
        lam=_get(p, "lambda", float, None),
        kernel=kernel,
        dataset=_get(p, "dataset", str, None),
        noise_scale=_get(p, "noise_scale", float, 0.1),
        controllers=controllers,
        budget=_get(r, "budget", int, 10_000),
        target=None if target.lower() == "none" else float(target),
        epsilon=_get(r, "epsilon", float, 0.0),
        gamma_init=_get(r, "gamma_init", float, None),
        polish_factor=_get(r, "polish_factor", float, 10.0),
        check_probes=_get(r, "check_probes", int, 0),
        name=_get(o, "name", str, family.lower()),
        root=Path(_get(o, "root", str, "results")),
        window=_get(o, "window", int, 200),
    )
    if cfg.budget < 0:
        raise ConfigurationError("[run] budget must be nonnegative")
    if not 0.0 <= cfg.epsilon < 1.0:
        raise ConfigurationError("[run] epsilon must lie in [0, 1)")
    if cfg.dataset is None and (cfg.m < 1 or cfg.n < 1):
        raise ConfigurationError("[problem] m and n must be positive")
    cfg.validate()
    return cfg


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, source=str(path))
