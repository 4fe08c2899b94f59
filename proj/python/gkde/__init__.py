"""Gamma kernel density estimation on the half line."""

import json as _json

from . import _core
from ._core import (
    BandwidthTooLarge,
    ConvergenceError,
    DomainError,
    EnvelopeViolation,
    Error,
    NegativeMass,
    NumericalError,
    QuadratureNonConvergence,
    bandwidth_rule,
    commands,
    estimate,
    fit_loglog,
    kernel_pdf,
    minimax_exponent,
    oracle_exponent,
    predict_regime,
)

__version__ = _core.__version__


def _spec(density):
    return density if isinstance(density, str) else _json.dumps(density)


def density_pdf(density, x):
    """Evaluate a test density given as a dict or JSON string."""
    return _core.density_pdf(_spec(density), list(x))


def sample(density, n, seed=42):
    """Draw n observations from a test density."""
    return _core.sample(_spec(density), n, seed)


def mc_risk(density, n, b, p, reps, seed=42):
    """Monte Carlo L^p risk of the estimator at bandwidth b."""
    return _core.mc_risk(_spec(density), n, b, p, reps, seed)


def run(command, **config):
    """Run a CLI command in process.

    Returns the CSV text and the results dictionary that the CLI stores in
    its sidecar.
    """
    config = dict(config, command=command)
    csv, results = _core.run(_json.dumps(config))
    return csv, _json.loads(results)


__all__ = [
    "BandwidthTooLarge",
    "ConvergenceError",
    "DomainError",
    "EnvelopeViolation",
    "Error",
    "NegativeMass",
    "NumericalError",
    "QuadratureNonConvergence",
    "bandwidth_rule",
    "commands",
    "density_pdf",
    "estimate",
    "fit_loglog",
    "kernel_pdf",
    "mc_risk",
    "minimax_exponent",
    "oracle_exponent",
    "predict_regime",
    "run",
    "sample",
]
