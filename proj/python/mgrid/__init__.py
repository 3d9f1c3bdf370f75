"""Microgrid storage and trading control with deep actor-critic agents."""

from ._mgrid import (
    ConfigError,
    DataError,
    config_errors,
    default_config,
    report,
    run,
    run_auction,
    synth_generate,
)

__all__ = [
    "ConfigError",
    "DataError",
    "config_errors",
    "default_config",
    "report",
    "run",
    "run_auction",
    "synth_generate",
]
