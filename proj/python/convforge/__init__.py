"""Sequence factorization and explicit deep CNN construction."""

from ._convforge import (
    DeepCnn,
    NumericalError,
    RidgeExpansion,
    RidgeTerm,
    ValidationError,
    build_network,
    convolve,
    count_free_parameters,
    evaluate,
    factorize_mask,
    fit_ridge,
    forward,
    free_parameter_formula,
    minimal_depth,
    rate_study,
    toeplitz,
)

__all__ = [
    "DeepCnn",
    "NumericalError",
    "RidgeExpansion",
    "RidgeTerm",
    "ValidationError",
    "build_network",
    "convolve",
    "count_free_parameters",
    "evaluate",
    "factorize_mask",
    "fit_ridge",
    "forward",
    "free_parameter_formula",
    "minimal_depth",
    "rate_study",
    "toeplitz",
]
