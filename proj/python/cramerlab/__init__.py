"""Cramer transform, half-space depth and random polytope estimators."""

from ._cramerlab import (
    ConfigError,
    DomainError,
    EstimatorDegenerate,
    Law1D,
    Model,
    OutOfRangeError,
    PrecisionError,
    SampleSizeError,
    __version__,
    beta,
    contains,
    cramer,
    cramer_moments,
    depth,
    estimate_measure,
    exp_half_moment_1d,
    locate_threshold,
    log_integral_moments,
    log_laplace,
    run_command,
    sample,
    sweep,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "EstimatorDegenerate",
    "Law1D",
    "Model",
    "OutOfRangeError",
    "PrecisionError",
    "SampleSizeError",
    "__version__",
    "beta",
    "contains",
    "cramer",
    "cramer_moments",
    "depth",
    "estimate_measure",
    "exp_half_moment_1d",
    "locate_threshold",
    "log_integral_moments",
    "log_laplace",
    "run_command",
    "sample",
    "sweep",
]
