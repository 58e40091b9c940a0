"""Configuration, experiment orchestration and the command-line interface."""

from .config import OUTPUT_ENV, RunConfig, load_config, parse_config, resolve_output_root
from .experiment import (
    PolishResult,
    polish_minimum,
    read_trace_csv,
    run_experiment,
    run_instance,
    stepsize_stats,
    write_trace_csv,
)

__all__ = [
    "OUTPUT_ENV", "RunConfig", "load_config", "parse_config", "resolve_output_root",
    "PolishResult", "polish_minimum", "read_trace_csv", "run_experiment", "run_instance",
    "stepsize_stats", "write_trace_csv",
]
