"""Exact CIR simulation and Gaussian quasi-likelihood estimation."""

import json

from ._core import (
    CirestError,
    CirParams,
    EstimationResult,
    asymptotic_prediction,
    cond_moments,
    ergodic_average,
    estimate,
    gqlf,
    gqlf_gradient,
    info_matrix,
    info_matrix_inverse,
    info_sqrt,
    invariant_moment,
    simulate_path,
)

__all__ = [
    "CirestError",
    "CirParams",
    "EstimationResult",
    "asymptotic_prediction",
    "cond_moments",
    "ergodic_average",
    "estimate",
    "gqlf",
    "gqlf_gradient",
    "info_matrix",
    "info_matrix_inverse",
    "info_sqrt",
    "invariant_moment",
    "run_study",
    "simulate_path",
]

__version__ = "0.1.0"


def run_study(truth, n, h, replications, seed=0, estimators=("initial", "newton", "scoring"), workers=1):
    """Run a replication study and return (summary dict, list of record dicts)."""
    from ._core import _run_study

    summary, records = _run_study(truth, n, h, replications, seed, list(estimators), workers)
    return json.loads(summary), records
