"""Wavelet-based test of Besov-type smoothness for densities."""

from ._besov import (
    AssumptionViolation,
    ConfigError,
    DegenerateError,
    Density,
    TestConfig,
    Wavelet,
    builtin,
    coefficients,
    enrich,
    estimate_energy,
    id_estimate,
    mixture,
    power_study,
    sample,
    threshold_terms,
    variance_terms,
)

__all__ = [
    "AssumptionViolation",
    "ConfigError",
    "DegenerateError",
    "Density",
    "TestConfig",
    "Wavelet",
    "builtin",
    "coefficients",
    "enrich",
    "estimate_energy",
    "id_estimate",
    "mixture",
    "power_study",
    "sample",
    "threshold_terms",
    "variance_terms",
]
