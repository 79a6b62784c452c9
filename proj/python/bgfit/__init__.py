"""Beta-geometric models of conception delay: fitting, Bayes updates and simulation."""

import json
import math

from ._bgfit import (
    DEFAULT_SEED,
    BetaGeometric,
    ConfigError,
    DegenerateDataError,
    DomainError,
    Error,
    InvalidMomentRegionError,
    MissingMomentsError,
    MomentNotExistError,
    NonConvergenceError,
    fit_mle,
    fit_mme,
    posterior,
    run_study_json,
    sample,
)

__all__ = [
    "DEFAULT_SEED",
    "BetaGeometric",
    "ConfigError",
    "DegenerateDataError",
    "DomainError",
    "Error",
    "InvalidMomentRegionError",
    "MissingMomentsError",
    "MomentNotExistError",
    "NonConvergenceError",
    "fit_mle",
    "fit_mme",
    "posterior",
    "run_study",
    "sample",
    "pmf",
]


def pmf(law, x):
    return math.exp(law.log_pmf(x))


def run_study(config=None):
    """Run a simulation study; ``config`` is a dict in the JSON config format."""
    return json.loads(run_study_json(json.dumps(config or {})))
