#!/usr/bin/env python3
"""
Model - Swift-Hohenberg-System erster Ordnung
Vektorfeld, erweitertes System (xi als Zustand), Energie, Taylor-Rekursion,
Jacobi-/Hesse-Terme, reversible Symmetrie und Umrechnung alpha <-> xi
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

import numpy as np

from numerics.interval import (
    DomainError,
    Interval,
    IntervalArray,
    IntervalMatrix,
    IntervalVector,
    inv_sqrt2,
)

# Schwellwert des Parameterbereichs der Äste (exakt darstellbar)
XI_THRESHOLD = 266291 * 2.0 ** -17

STATE_DIM = 4
EXTENDED_DIM = 5
X, Y, Z, W, XI = range(5)


@dataclass(frozen=True)
class ModelParams:
    """Parameter xi des skalierten Systems"""
    xi: Interval

    def __post_init__(self):
        object.__setattr__(self, "xi", Interval.coerce(self.xi))

    def validate(self) -> None:
        """Zulässiger Bereich der Beweisläufe: 0 <= xi <= sqrt(8)"""
        if self.xi.lo < 0.0 or Fraction(self.xi.hi) ** 2 > 8:
            raise DomainError(f"xi = {self.xi} liegt nicht in [0, sqrt(8)]")


@dataclass(frozen=True)
class SystemState:
    x: Interval
    y: Interval
    z: Interval
    w: Interval

    def __post_init__(self):
        for name in ("x", "y", "z", "w"):
            object.__setattr__(self, name, Interval.coerce(getattr(self, name)))

    def as_vector(self) -> IntervalVector:
        return IntervalVector.of(self.x, self.y, self.z, self.w)

    @classmethod
    def from_vector(cls, v: IntervalArray) -> "SystemState":
        return cls(v[X], v[Y], v[Z], v[W])


@dataclass(frozen=True)
class ExtendedState:
    state: SystemState
    xi: Interval

    def __post_init__(self):
        object.__setattr__(self, "xi", Interval.coerce(self.xi))

    def as_vector(self) -> IntervalVector:
        s = self.state
        return IntervalVector.of(s.x, s.y, s.z, s.w, self.xi)

    @classmethod
    def from_vector(cls, v: IntervalArray) -> "ExtendedState":
        return cls(SystemState(v[X], v[Y], v[Z], v[W]), v[XI])


# --------------------------------------------------------------------------
# Punktweise Größen
# --------------------------------------------------------------------------

def vector_field(s: SystemState, p: ModelParams) -> IntervalVector:
    """(y, z, w, -xi*z + x - x^3)"""
    last = -(p.xi * s.z) + s.x - s.x ** 3
    return IntervalVector.of(s.y, s.z, s.w, last)


def extended_vector_field(s: ExtendedState) -> IntervalVector:
    f = vector_field(s.state, ModelParams(s.xi))
    return IntervalVector.of(*f.components(), 0.0)


def energy(s: SystemState, p: ModelParams) -> Interval:
    """Erstes Integral E = w*y - z^2/2 + (xi/2)*y^2 + (x^2-1)^2/4"""
    return (s.w * s.y - s.z.sqr() / 2.0 + p.xi * s.y.sqr() / 2.0
            + (s.x.sqr() - 1.0).sqr() / 4.0)


def energy_of_vector(u: IntervalArray, xi: Optional[Interval] = None) -> Interval:
    """Energie eines (erweiterten) Zustandsvektors"""
    if xi is None:
        xi = u[XI]
    return energy(SystemState.from_vector(u), ModelParams(xi))


def section_z(x: Interval, branch: int = 1) -> Interval:
    """z-Koordinate auf dem Schnitt y=w=0 im Energieniveau E=0"""
    value = (Interval.coerce(x).sqr() - 1.0) * inv_sqrt2()
    return value if branch > 0 else -value


def section_point(x: Interval) -> SystemState:
    return SystemState(x, 0.0, section_z(x), 0.0)


def reverse(s: SystemState) -> SystemState:
    """R(x,y,z,w) = (x,-y,z,-w), exakt"""
    return SystemState(s.x, -s.y, s.z, -s.w)


def reverse_vector(u: IntervalArray) -> IntervalArray:
    sign = np.ones(u.shape[0])
    sign[[Y, W]] = -1.0
    lo = np.where(sign > 0, u.lo, -u.hi)
    hi = np.where(sign > 0, u.hi, -u.lo)
    return type(u)(lo, hi)


def jacobian(s: SystemState, p: ModelParams, extended: bool = False) -> IntervalMatrix:
    n = EXTENDED_DIM if extended else STATE_DIM
    rows = [[Interval(0.0)] * n for _ in range(n)]
    rows[X][Y] = Interval(1.0)
    rows[Y][Z] = Interval(1.0)
    rows[Z][W] = Interval(1.0)
    rows[W][X] = 1.0 - 3.0 * s.x.sqr()
    rows[W][Z] = -p.xi
    if extended:
        rows[W][XI] = -s.z
    return IntervalMatrix.from_intervals(rows)


@dataclass(frozen=True)
class HessianTerms:
    """Einzige nichtlineare Komponente ist w'; alle übrigen zweiten Ableitungen sind 0"""
    d2w_dx2: Interval
    d2w_dxi_dz: Interval
    extended: bool

    def bilinear(self, u: IntervalArray, v: IntervalArray) -> IntervalVector:
        """D^2 f [u, v] als Vektor"""
        w_entry = self.d2w_dx2 * u[X] * v[X]
        if self.extended:
            w_entry = w_entry + self.d2w_dxi_dz * (u[XI] * v[Z] + u[Z] * v[XI])
        n = EXTENDED_DIM if self.extended else STATE_DIM
        items = [Interval(0.0)] * n
        items[W] = w_entry
        return IntervalVector.of(*items)


def hessian_terms(s: SystemState, p: ModelParams, extended: bool = False) -> HessianTerms:
    return HessianTerms(d2w_dx2=-6.0 * s.x,
                        d2w_dxi_dz=Interval(-1.0 if extended else 0.0),
                        extended=extended)


def xi_to_alpha(xi: Interval) -> Interval:
    """alpha = 1 + 4/xi^2"""
    xi = Interval.coerce(xi)
    if xi.lo <= 0.0:
        raise DomainError(f"xi_to_alpha benötigt xi > 0, erhalten {xi}")
    return 1.0 + 4.0 / xi.sqr()


def alpha_to_xi(alpha: Interval) -> Interval:
    """xi = 2/sqrt(alpha - 1)"""
    alpha = Interval.coerce(alpha)
    if alpha.lo <= 1.0:
        raise DomainError(f"alpha_to_xi benötigt alpha > 1, erhalten {alpha}")
    return 2.0 / (alpha - 1.0).sqrt()


# --------------------------------------------------------------------------
# Taylor-Rekursion
# --------------------------------------------------------------------------

def _stack(items: List[IntervalArray]) -> IntervalArray:
    return IntervalArray(np.stack([i.lo for i in items]),
                         np.stack([i.hi for i in items]), check=False)


def _expand(a: IntervalArray, ndim: int) -> IntervalArray:
    extra = ndim - a.ndim
    if extra <= 0:
        return a
    shape = a.shape + (1,) * extra
    return a.reshape(shape)


def _cauchy(a: List[IntervalArray], b: List[IntervalArray], k: int) -> IntervalArray:
    """k-ter Koeffizient des Reihenprodukts: sum_i a_i * b_(k-i)"""
    left = _stack(a[:k + 1])
    right = _stack(b[k::-1])
    ndim = max(left.ndim, right.ndim)
    return (_expand(left, ndim) * _expand(right, ndim)).sum(axis=0)


def _cauchy_outer(a: List[IntervalArray], b: List[IntervalArray], k: int) -> IntervalArray:
    """sum_i a_i ⊗ b_(k-i) für Zeilenvektoren der Länge m"""
    left = _stack(a[:k + 1])
    right = _stack(b[k::-1])
    left = IntervalArray(left.lo[:, :, None], left.hi[:, :, None], check=False)
    right = IntervalArray(right.lo[:, None, :], right.hi[:, None, :], check=False)
    return (left * right).sum(axis=0)


def _outer(u: IntervalArray, v: IntervalArray) -> IntervalArray:
    return (IntervalArray(u.lo[:, None], u.hi[:, None], check=False)
            * IntervalArray(v.lo[None, :], v.hi[None, :], check=False))


@dataclass
class TaylorJets:
    """Taylor-Koeffizienten c_k von Zustand, erster (V) und zweiter (W) Variation"""
    state: List[IntervalArray]
    V: Optional[List[IntervalArray]] = None
    W: Optional[List[IntervalArray]] = None

    @property
    def order(self) -> int:
        return len(self.state) - 1


class SwiftHohenbergSystem:
    """Swift-Hohenberg-System (4D) bzw. erweitertes System (5D, xi' = 0)"""

    def __init__(self, extended: bool = False, xi: Optional[Interval] = None,
                 cubic: bool = True):
        self.logger = logging.getLogger(__name__)
        self.extended = extended
        self.cubic = cubic
        self.dimension = EXTENDED_DIM if extended else STATE_DIM
        if not extended:
            if xi is None:
                raise DomainError("Nicht erweitertes System benötigt einen Parameter xi")
            self.xi = Interval.coerce(xi)
        else:
            self.xi = None

    def parameter_of(self, u: IntervalArray) -> Interval:
        return u[XI] if self.extended else self.xi

    def vector_field(self, u: IntervalArray) -> IntervalVector:
        xi = self.parameter_of(u)
        x, y, z, w = u[X], u[Y], u[Z], u[W]
        last = x - xi * z
        if self.cubic:
            last = last - x ** 3
        items = [y, z, w, last] + ([Interval(0.0)] if self.extended else [])
        return IntervalVector.of(*items)

    def jacobian(self, u: IntervalArray) -> IntervalMatrix:
        state = SystemState.from_vector(u)
        J = jacobian(state, ModelParams(self.parameter_of(u)), self.extended)
        if not self.cubic:
            J = IntervalMatrix.coerce(J.with_item((W, X), 1.0))
        return J

    def jets(self, u0: IntervalArray, order: int,
             V0: Optional[IntervalArray] = None,
             W0: Optional[IntervalArray] = None) -> TaylorJets:
        """Taylor-Koeffizienten bis zur gegebenen Ordnung (Potenzreihen-Rekursion)"""
        n = self.dimension
        zero = IntervalArray(0.0)
        x = [u0[X:X + 1].reshape(())]
        y = [u0[Y:Y + 1].reshape(())]
        z = [u0[Z:Z + 1].reshape(())]
        w = [u0[W:W + 1].reshape(())]
        xi0 = IntervalArray.coerce(self.parameter_of(u0))
        s: List[IntervalArray] = []
        cube: List[IntervalArray] = []

        with_V = V0 is not None
        with_W = with_V and W0 is not None
        if with_V:
            m = V0.shape[1]
            Vx, Vy, Vz, Vw = [V0[X]], [V0[Y]], [V0[Z]], [V0[W]]
            Vxi0 = V0[XI] if self.extended else None
            sVx_terms: List[IntervalArray] = []
            zero_row = IntervalArray.zeros((m,))
        if with_W:
            Wx, Wy, Wz, Ww = [W0[X]], [W0[Y]], [W0[Z]], [W0[W]]
            Wxi0 = W0[XI] if self.extended else None
            P: List[IntervalArray] = []
            zero_mat = IntervalArray.zeros((m, m))

        for k in range(order):
            denom = float(k + 1)
            s.append(_cauchy(x, x, k))
            last = x[k] - xi0 * z[k]
            if self.cubic:
                cube.append(_cauchy(x, s, k))
                last = last - cube[k]
            x.append(y[k] / denom)
            y.append(z[k] / denom)
            z.append(w[k] / denom)
            w.append(last / denom)

            if with_V:
                dlast = Vx[k] - xi0 * Vz[k]
                if self.cubic:
                    dlast = dlast - 3.0 * _cauchy(s, Vx, k)
                if self.extended:
                    dlast = dlast - z[k] * Vxi0
                Vx.append(Vy[k] / denom)
                Vy.append(Vz[k] / denom)
                Vz.append(Vw[k] / denom)
                Vw.append(dlast / denom)

            if with_W:
                ddlast = Wx[k] - xi0 * Wz[k]
                if self.cubic:
                    P.append(_cauchy_outer(Vx, Vx, k))
                    ddlast = (ddlast - 3.0 * _cauchy(s, Wx, k)
                              - 6.0 * _cauchy(x, P, k))
                if self.extended:
                    mixed = _outer(Vxi0, Vz[k])
                    ddlast = ddlast - (mixed + mixed.T) - z[k] * Wxi0
                Wx.append(Wy[k] / denom)
                Wy.append(Wz[k] / denom)
                Wz.append(Ww[k] / denom)
                Ww.append(ddlast / denom)

        def assemble(rows, const0, zero_item):
            out = []
            for k in range(order + 1):
                items = [r[k] for r in rows]
                if self.extended:
                    items.append(const0 if k == 0 else zero_item)
                out.append(_stack(items))
            return out

        state = assemble([x, y, z, w], xi0, zero)
        jets = TaylorJets(state=state)
        if with_V:
            jets.V = assemble([Vx, Vy, Vz, Vw], Vxi0, zero_row)
        if with_W:
            jets.W = assemble([Wx, Wy, Wz, Ww], Wxi0, zero_mat)
        if jets.state[0].shape != (n,):
            raise DomainError(f"Zustand hat Form {jets.state[0].shape}, erwartet ({n},)")
        return jets


def taylor_coefficients(s, p: Optional[ModelParams], order: int) -> List[IntervalVector]:
    """Koeffizienten c_0..c_order der formalen Lösung mit c_0 = s"""
    if order < 1:
        raise DomainError("taylor_coefficients benötigt order >= 1")
    if isinstance(s, ExtendedState):
        system = SwiftHohenbergSystem(extended=True)
    else:
        system = SwiftHohenbergSystem(extended=False, xi=p.xi)
    jets = system.jets(s.as_vector(), order)
    return [IntervalVector.coerce(c) for c in jets.state]
