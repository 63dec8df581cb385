"""Heralded generation of even/odd coherent-state superpositions.

A squeezed vacuum passes two identical beam splitters, each mixing it with a
single ancilla photon; photon-number-resolving detection on the two ancilla
modes heralds a definite-parity state in the surviving mode.
"""

from scsherald.errors import ConvergenceError, DomainError, TruncationError
from scsherald.states import (
    FockVector,
    Parity,
    SCSTarget,
    SqueezeParams,
    fidelity,
    scs_state,
    smsv_state,
    squeeze_from,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "FockVector",
    "Parity",
    "SCSTarget",
    "SqueezeParams",
    "TruncationError",
    "fidelity",
    "scs_state",
    "smsv_state",
    "squeeze_from",
    "__version__",
]
