"""qmac: capacity calculations for quantum and classical multi-access channels.

Submodules:
    qstate          dense multi-qubit states and entropies
    discrete_mac    helper-sender constructions, bounds and protocol rates
    capacity_region classical MAC regions as polymatroids
    gaussian        covariance-matrix states and channels
    cv_rates        Gaussian rate formulas, bounds and threshold solvers
    cli             command-line interface
"""
from ._accel import backend_name
from .errors import (
    DomainError,
    InfeasibleError,
    QmacError,
    QubitIndexError,
    SizeError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "InfeasibleError",
    "QmacError",
    "QubitIndexError",
    "SizeError",
    "ValidationError",
    "backend_name",
]
