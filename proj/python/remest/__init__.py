"""Multi-sensor remote state estimation over a shared interference channel.

Thin wrapper around the compiled extension; see the project README for
the config schema and CLI equivalents.
"""

from ._core import (
    CapacityError,
    Config,
    ConfigError,
    InfeasibleProfileError,
    IoError,
    NumericError,
    UnsupportedGameError,
    equilibrium,
    gaussian_q,
    load_config,
    parse_config,
    run_once,
    ser,
    simulate,
    sinr,
    steady_state,
    verify,
)

__all__ = [
    "CapacityError",
    "Config",
    "ConfigError",
    "InfeasibleProfileError",
    "IoError",
    "NumericError",
    "UnsupportedGameError",
    "equilibrium",
    "gaussian_q",
    "load_config",
    "parse_config",
    "run_once",
    "ser",
    "simulate",
    "sinr",
    "steady_state",
    "verify",
]
