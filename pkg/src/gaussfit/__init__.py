"""Closed-form Gaussian fitting (Caruana, Guo, Roonizi, FAS) and a Monte Carlo bench."""

from .errors import (
    DataError,
    FitFailure,
    GaussFitError,
    InvalidCurvature,
    InvalidDataset,
    NonIncreasingX,
    NonPositivePeak,
    ParseError,
    SingularSystem,
    TooFewPoints,
)
from .fitters import (
    Algorithm,
    FitResult,
    IterationPolicy,
    QuadraticCoeffs,
    RooniziCoeffs,
    estimate_sigma_fas,
    fit,
    fit_caruana,
    fit_fas,
    fit_guo,
    fit_roonizi,
    params_from_quadratic,
)
from .model import Dataset, GaussianParams, Scenario, evaluate, synthesize

__version__ = "0.1.0"
