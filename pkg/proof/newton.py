#!/usr/bin/env python3
"""
Intervall-Newton - Existenz und Eindeutigkeit von Nullstellen
Skalar, parametrisiert (Nullstellen als Graph über einer Parameterbox) und 2D.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Tuple, Union

import numpy as np

from numerics.interval import (
    EMPTY,
    DivisionByZeroInterval,
    Interval,
    IntervalMatrix,
    IntervalVector,
    SingularIntervalMatrix,
    mat_inverse,
)


class NewtonStatus(Enum):
    PROVEN = "Proven"
    INCONCLUSIVE = "Inconclusive"
    DEFECT = "Defect"


@dataclass
class NewtonOutcome:
    status: NewtonStatus
    refined: Union[Interval, IntervalVector, None]
    uniqueness_box: Union[Interval, IntervalVector]
    derivative_used: Optional[IntervalMatrix]
    reason: str = ""
    operator_image: Union[Interval, IntervalVector, None] = field(default=None, repr=False)

    @property
    def proven(self) -> bool:
        return self.status is NewtonStatus.PROVEN

    def to_record(self) -> dict:
        def rec(value):
            if value is None:
                return None
            return value.to_record()
        return {
            "status": self.status.value,
            "refined": rec(self.refined),
            "uniqueness_box": rec(self.uniqueness_box),
            "derivative_used": rec(self.derivative_used),
            "reason": self.reason,
        }


def _as_matrix(value: Interval) -> IntervalMatrix:
    return IntervalMatrix([[value.lo]], [[value.hi]])


def newton_operator(residual: Interval, derivative: Interval, X: Interval,
                    x0: Optional[float] = None) -> NewtonOutcome:
    """N = x0 - [e]/[A]; Proven genau dann, wenn N im Inneren von X liegt"""
    X = Interval.coerce(X)
    if x0 is None:
        x0 = X.mid
    if not X.lo < x0 < X.hi and not X.is_point():
        raise ValueError(f"x0={x0!r} liegt nicht im Inneren von {X}")
    A = Interval.coerce(derivative)
    if A.contains_zero():
        return NewtonOutcome(NewtonStatus.DEFECT, None, X, _as_matrix(A),
                             reason=f"Ableitung {A} enthält 0")
    try:
        N = x0 - Interval.coerce(residual) / A
    except DivisionByZeroInterval as exc:
        return NewtonOutcome(NewtonStatus.DEFECT, None, X, _as_matrix(A), reason=str(exc))
    refined = N.intersect(X)
    if N.subset_interior(X):
        return NewtonOutcome(NewtonStatus.PROVEN, refined, X, _as_matrix(A), operator_image=N)
    if refined is EMPTY:
        return NewtonOutcome(NewtonStatus.INCONCLUSIVE, N, X, _as_matrix(A),
                             reason="N ∩ X leer: keine Nullstelle in X", operator_image=N)
    return NewtonOutcome(NewtonStatus.INCONCLUSIVE, refined, X, _as_matrix(A),
                         reason=f"N = {N} nicht im Inneren von X", operator_image=N)


def newton_scalar(f_eval: Callable[[Interval], Tuple[Interval, Interval]], X: Interval,
                  x0: Optional[float] = None) -> NewtonOutcome:
    """f_eval(x) liefert (f(x), f'(x)); f im Punkt x0, f' über X"""
    X = Interval.coerce(X)
    if x0 is None:
        x0 = X.mid
    value, _ = f_eval(Interval(x0))
    _, derivative = f_eval(X)
    return newton_operator(value, derivative, X, x0)


def newton_parameterized(f_eval: Callable[[Interval, Interval], Tuple[Interval, Interval]],
                         Z: Interval, X: Interval, x0: Optional[float] = None) -> NewtonOutcome:
    """N = x0 - [A]^-1 [e] mit [e] ⊇ f(Z, x0), [A] ⊇ f_x(Z, X)

    Proven: die Nullstellenmenge in Z×X ist Graph einer glatten Funktion Z -> N.
    """
    X = Interval.coerce(X)
    if x0 is None:
        x0 = X.mid
    residual, _ = f_eval(Interval.coerce(Z), Interval(x0))
    _, derivative = f_eval(Interval.coerce(Z), X)
    return newton_operator(residual, derivative, X, x0)


def newton_2d(h_eval: Callable[[IntervalVector], Tuple[IntervalVector, IntervalMatrix]],
              X: IntervalVector, x0: Optional[np.ndarray] = None) -> NewtonOutcome:
    """N = x0 - [DH(X)]^-1 H(x0) in Dimension 2"""
    X = IntervalVector.coerce(X)
    if x0 is None:
        x0 = X.mid()
    x0 = np.asarray(x0, dtype=np.float64)
    H0, _ = h_eval(IntervalVector(x0))
    _, DH = h_eval(X)
    return newton_2d_operator(H0, DH, X, x0)


def newton_2d_operator(H0: IntervalVector, DH: IntervalMatrix, X: IntervalVector,
                       x0: np.ndarray) -> NewtonOutcome:
    X = IntervalVector.coerce(X)
    DH = IntervalMatrix.coerce(DH)
    try:
        inverse = mat_inverse(DH)
    except SingularIntervalMatrix as exc:
        return NewtonOutcome(NewtonStatus.DEFECT, None, X, DH, reason=str(exc))
    N = IntervalVector.coerce(x0 - inverse @ IntervalVector.coerce(H0))
    refined = N.intersect(X)
    if N.subset_interior(X):
        return NewtonOutcome(NewtonStatus.PROVEN, IntervalVector.coerce(refined), X, DH,
                             operator_image=N)
    if refined is EMPTY:
        return NewtonOutcome(NewtonStatus.INCONCLUSIVE, N, X, DH,
                             reason="N ∩ X leer: keine Nullstelle in X", operator_image=N)
    return NewtonOutcome(NewtonStatus.INCONCLUSIVE, IntervalVector.coerce(refined), X, DH,
                         reason="N nicht im Inneren von X", operator_image=N)


def same_zero(a: NewtonOutcome, b: NewtonOutcome) -> bool:
    """Zwei bewiesene Ergebnisse mit überlappenden Einschließungen beschreiben dieselbe Nullstelle"""
    if not (a.proven and b.proven):
        return False
    return bool(a.refined.intersects(b.refined))
