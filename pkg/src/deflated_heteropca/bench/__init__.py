"""Experiment runner, file formats and command-line interface."""
from .config import ExperimentSpec, load_experiment, parse_experiment
from .harness import (
    SweepResult,
    SweepRow,
    TrialResult,
    derive_seed,
    emit_csv,
    emit_raw_csv,
    run_sweep,
    run_trial,
)

__all__ = [
    "ExperimentSpec",
    "SweepResult",
    "SweepRow",
    "TrialResult",
    "derive_seed",
    "emit_csv",
    "emit_raw_csv",
    "load_experiment",
    "parse_experiment",
    "run_sweep",
    "run_trial",
]
