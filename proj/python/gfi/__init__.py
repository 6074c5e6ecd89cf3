"""Gaussian functional inequalities: deficits, identities and the moment-measure solver."""

import json as _json

from ._core import (
    ConfigError,
    DomainError,
    MomentSolution,
    NumericalError,
    RelativeDensity,
    bochner_identity,
    check_names,
    cross_identity,
    deficit_report,
    delta,
    ent_iden,
    entropy,
    fisher_information,
    gaussian,
    gaussian_mixture,
    logcosh,
    poincare_constant,
    quartic,
    recenter,
    scaled_gaussian,
    solve_1d,
    standard_corpus,
    uniform,
    w2_squared,
)
from ._core import run_suite as _run_suite


def run_suite(config):
    """Run a suite from a config dict or JSON string; returns the report rows as dicts."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run_suite(config)


__all__ = [
    "ConfigError",
    "DomainError",
    "MomentSolution",
    "NumericalError",
    "RelativeDensity",
    "bochner_identity",
    "check_names",
    "cross_identity",
    "deficit_report",
    "delta",
    "ent_iden",
    "entropy",
    "fisher_information",
    "gaussian",
    "gaussian_mixture",
    "logcosh",
    "poincare_constant",
    "quartic",
    "recenter",
    "run_suite",
    "scaled_gaussian",
    "solve_1d",
    "standard_corpus",
    "uniform",
    "w2_squared",
]
