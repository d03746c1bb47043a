from ._dpde import (
    BlowupError,
    ConfigError,
    InvalidInput,
    InvalidStateError,
    canonical_config,
    certify,
    eigenvalues,
    fractional_norm,
    run,
    simulate,
)

__all__ = [
    "BlowupError",
    "ConfigError",
    "InvalidInput",
    "InvalidStateError",
    "canonical_config",
    "certify",
    "eigenvalues",
    "fractional_norm",
    "run",
    "simulate",
]
