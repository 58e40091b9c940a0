"""Bregman proximal gradient iterations and their stepsize controllers."""

from .bagraal import GAMMA_MAX, NU, RHO_BAR, bagraal_step, bagraal_stepsize
from .core import (
    Initialization,
    bpg_step,
    inclusion_residual,
    initialize_stepsizes,
    subgradient_element,
)
from .linesearch import bpg_linesearch_step, descent_certificate
from .rules import (
    RULES,
    adapg_1half_stepsize,
    adapg_stepsize,
    badapg_alpha_stepsize,
    badapg_stepsize,
    curvature_bracket,
)
from .runner import CONTROLLERS, check_compatibility, run
from .state import (
    CSV_HEADER,
    CURVATURE,
    GOLDEN_RATIO,
    GROWTH,
    SolverState,
    StepsizeDecision,
    TraceRecord,
    Trajectory,
    record_row,
)

__all__ = [
    "GAMMA_MAX", "NU", "RHO_BAR", "bagraal_step", "bagraal_stepsize",
    "Initialization", "bpg_step", "inclusion_residual", "initialize_stepsizes", "subgradient_element",
    "bpg_linesearch_step", "descent_certificate",
    "RULES", "adapg_1half_stepsize", "adapg_stepsize", "badapg_alpha_stepsize", "badapg_stepsize",
    "curvature_bracket",
    "CONTROLLERS", "check_compatibility", "run",
    "CSV_HEADER", "CURVATURE", "GOLDEN_RATIO", "GROWTH", "SolverState", "StepsizeDecision",
    "TraceRecord", "Trajectory", "record_row",
]
