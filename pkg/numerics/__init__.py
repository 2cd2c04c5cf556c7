"""Validierte Numerik: Intervallarithmetik mit Auswärtsrundung"""

from .interval import (
    EMPTY,
    DivisionByZeroInterval,
    DomainError,
    Interval,
    IntervalArray,
    IntervalError,
    IntervalMatrix,
    IntervalOverflowError,
    IntervalVector,
    ProverError,
    SingularIntervalMatrix,
    inv_sqrt2,
    mat_inverse,
    split,
)

__all__ = [
    "EMPTY",
    "DivisionByZeroInterval",
    "DomainError",
    "Interval",
    "IntervalArray",
    "IntervalError",
    "IntervalMatrix",
    "IntervalOverflowError",
    "IntervalVector",
    "ProverError",
    "SingularIntervalMatrix",
    "inv_sqrt2",
    "mat_inverse",
    "split",
]
