"""Deterministic seeded simulation engine."""

from .core import (
    AGENT_CAPACITY,
    CapacityExceeded,
    Command,
    EngineError,
    IllegalTransition,
    OFFSPRING_FRACTION,
    SimConfig,
    SimFrame,
    SimState,
    Status,
    TimeSeries,
    control,
    init_run,
    run,
    sanitize_name,
    series_names,
    step,
)
from .rng import Xoshiro256StarStar, mix64, reset_seed, substream_seed

__all__ = [
    "AGENT_CAPACITY",
    "CapacityExceeded",
    "Command",
    "EngineError",
    "IllegalTransition",
    "OFFSPRING_FRACTION",
    "SimConfig",
    "SimFrame",
    "SimState",
    "Status",
    "TimeSeries",
    "Xoshiro256StarStar",
    "control",
    "init_run",
    "mix64",
    "reset_seed",
    "run",
    "sanitize_name",
    "series_names",
    "step",
    "substream_seed",
]
