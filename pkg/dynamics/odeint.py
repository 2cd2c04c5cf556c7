#!/usr/bin/env python3
"""
ODE-Integrator - Rigorose Taylor-Integration
Einschließung des Flusses sowie der ersten und zweiten Variationsgleichungen.

Ablauf eines Schritts:
    1. Taylor-Koeffizienten im Mittelpunkt und über der Hülle der Menge
    2. Grobe Einschließung über [0, h] per High-Order-Enclosure-Test
       (Aufblähen bis zur Inklusion, sonst Schrittweite halbieren)
    3. Endzustand als Mittelwertform und Lohner-Doubleton-Update (QR)
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from dynamics.model import (
    ExtendedState,
    ModelParams,
    SwiftHohenbergSystem,
    SystemState,
    TaylorJets,
    energy_of_vector,
)
from numerics.interval import (
    Interval,
    IntervalArray,
    IntervalMatrix,
    IntervalVector,
    ProverError,
)

REPRESENTATIONS = ("doubleton", "box")


class IntegrationError(ProverError):
    """Fehler bei der rigorosen Integration"""


class ValidationFailed(IntegrationError):
    """Keine grobe Einschließung bei minimaler Schrittweite"""


class StepUnderflow(IntegrationError):
    """Benötigte Schrittweite unterhalb min_step"""


@dataclass
class IntegratorConfig:
    taylor_order: int = 20
    tolerance: float = 1e-14
    min_step: float = 1e-6
    max_step: float = 0.5
    representation: str = "doubleton"
    safety: float = 0.9
    max_inflations: int = 8
    trace_path: Optional[str] = None

    def validate(self) -> None:
        if self.taylor_order < 3:
            raise ValueError(f"taylor_order muss >= 3 sein, ist {self.taylor_order}")
        if not (0.0 < self.min_step <= self.max_step):
            raise ValueError(f"Ungültige Schrittweiten: min={self.min_step}, max={self.max_step}")
        if self.tolerance <= 0.0:
            raise ValueError(f"tolerance muss positiv sein, ist {self.tolerance}")
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"Unbekannte Darstellung: {self.representation}")


# --------------------------------------------------------------------------
# Mengendarstellungen
# --------------------------------------------------------------------------

@dataclass
class DoubletonSet:
    """Menge x = center + C r0 + B r (C, B Punktmatrizen, r0 und r Intervallvektoren)"""
    center: np.ndarray
    C: np.ndarray
    r0: IntervalVector
    B: np.ndarray
    r: IntervalVector

    @classmethod
    def from_box(cls, box: IntervalArray) -> "DoubletonSet":
        box = IntervalVector.coerce(box)
        n = box.shape[0]
        center = box.mid()
        return cls(center=center, C=np.zeros((n, 1)), r0=IntervalVector([0.0]),
                   B=np.eye(n), r=IntervalVector.coerce(box - center))

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    def hull(self) -> IntervalVector:
        value = (self.center + IntervalMatrix(self.C) @ self.r0
                 + IntervalMatrix(self.B) @ self.r)
        return IntervalVector.coerce(value)


@dataclass
class VariationSet:
    """Ableitungen nach den Anfangsdaten: V = V_center + B R (B der Zustandsmenge), W als Box"""
    V_center: np.ndarray
    R: IntervalArray
    W: Optional[IntervalArray] = None

    @classmethod
    def from_enclosure(cls, V0: IntervalArray, W0: Optional[IntervalArray] = None) -> "VariationSet":
        center = V0.mid()
        return cls(V_center=center, R=V0 - center, W=W0)

    def hull(self, B: np.ndarray) -> IntervalArray:
        return self.V_center + IntervalMatrix(B) @ self.R


@dataclass
class FlowEnclosure:
    time_step: Interval
    start: IntervalVector
    end: IntervalVector
    tube: IntervalVector
    monodromy: Optional[IntervalMatrix] = None
    second_variations: Optional[IntervalArray] = None


def _horner(coeffs: List[IntervalArray], t: Interval) -> IntervalArray:
    result = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        result = result * t + c
    return result


def _orthonormal_basis(M: np.ndarray, r: IntervalArray) -> np.ndarray:
    """QR-Basis von M, Spalten nach Beitrag zur Mengenbreite sortiert"""
    widths = np.linalg.norm(M, axis=0) * r.rad()
    order = np.argsort(-widths, kind="stable")
    Q, _ = np.linalg.qr(M[:, order])
    return Q


def _orthogonal_inverse(Q: np.ndarray) -> IntervalMatrix:
    """Einschließung von Q^-1 für numerisch orthogonales Q (Neumann-Reihe)"""
    n = Q.shape[0]
    Qt = IntervalMatrix(Q.T)
    E = IntervalMatrix(np.eye(n)) - Qt @ IntervalMatrix(Q)
    delta = float(np.max(IntervalArray(E.mag()).sum(axis=1).hi))
    if delta >= 0.5:
        raise ValidationFailed(f"QR-Basis nicht invertierbar (delta={delta:.3e})")
    factor = (Interval(delta) / (1.0 - Interval(delta))).hi
    norm_qt = float(np.max(IntervalArray(np.abs(Q.T)).sum(axis=1).hi))
    radius = (Interval(factor) * norm_qt).hi
    return IntervalMatrix.coerce(Qt.inflate(absolute=radius))


def _chain_second(A: IntervalArray, D2: IntervalArray, W_old: IntervalArray,
                  V_old: IntervalArray) -> IntervalArray:
    """W_neu[:,i,j] = A W_alt[:,i,j] + D2[V_alt e_i, V_alt e_j]"""
    n, m = V_old.shape
    AW = (A @ W_old.reshape(n, m * m)).reshape(n, m, m)
    partial = (D2[:, :, :, None] * V_old[None, None, :, :]).sum(axis=2)
    term = (V_old[None, :, :, None] * partial[:, :, None, :]).sum(axis=1)
    return AW + term


class TaylorStep:
    """Validierter Schritt der Länge h; auswertbar für jede Zeit t in [0, h]"""

    def __init__(self, h: float, start: DoubletonSet, variations: Optional[VariationSet],
                 point_coeffs: List[IntervalArray], point_remainder: IntervalArray,
                 hull_jets: TaylorJets, rough: TaylorJets, tube_bound: IntervalVector):
        self.h = h
        self.start = start
        self.variations = variations
        self.point_coeffs = point_coeffs
        self.point_remainder = point_remainder
        self.hull_jets = hull_jets
        self.rough = rough
        self.tube_bound = tube_bound
        self.order = len(point_coeffs) - 1
        self._tube: Optional[IntervalVector] = None

    def _evaluate(self, coeffs: List[IntervalArray], remainder: IntervalArray,
                  t: Union[float, Interval]) -> IntervalArray:
        t = Interval.coerce(t)
        return _horner(coeffs, t) + remainder * t ** (self.order + 1)

    def point_solution(self, t) -> IntervalVector:
        """Lösung durch den Mittelpunkt"""
        value = self._evaluate(self.point_coeffs, self.point_remainder, t)
        return IntervalVector.coerce(value)

    def flow_derivative(self, t) -> IntervalMatrix:
        """D phi_t über der Hülle der Startmenge"""
        value = self._evaluate(self.hull_jets.V, self.rough.V[-1], t)
        return IntervalMatrix.coerce(value)

    def flow_second(self, t) -> IntervalArray:
        return self._evaluate(self.hull_jets.W, self.rough.W[-1], t)

    def state_at(self, t) -> IntervalVector:
        A = self.flow_derivative(t)
        X = self.start
        value = (self.point_solution(t) + (A @ IntervalMatrix(X.C)) @ X.r0
                 + (A @ IntervalMatrix(X.B)) @ X.r)
        return IntervalVector.coerce(value)

    def variations_at(self, t):
        """(V(t), W(t)) als Intervall-Arrays"""
        A = self.flow_derivative(t)
        var = self.variations
        V = A @ IntervalMatrix(var.V_center) + (A @ IntervalMatrix(self.start.B)) @ var.R
        W = None
        if var.W is not None:
            W = _chain_second(A, self.flow_second(t), var.W, var.hull(self.start.B))
        return V, W

    @property
    def tube(self) -> IntervalVector:
        """Einschließung aller Zustände für t in [0, h]"""
        if self._tube is None:
            sweep = self.state_at(Interval(0.0, self.h))
            narrowed = sweep.intersect(self.tube_bound)
            self._tube = IntervalVector.coerce(narrowed if narrowed else self.tube_bound)
        return self._tube


class TaylorIntegrator:
    """Einmal verwendbarer Integrator für eine Menge von Anfangswerten"""

    def __init__(self, system: SwiftHohenbergSystem, config: IntegratorConfig,
                 derivative_order: int = 0):
        self.logger = logging.getLogger(__name__)
        config.validate()
        self.system = system
        self.config = config
        self.derivative_order = derivative_order
        self.current: Optional[DoubletonSet] = None
        self.variations: Optional[VariationSet] = None
        self.time = Interval(0.0)
        self.steps_taken = 0
        self._trace_rows: List[list] = []

    def initialize(self, initial: Union[DoubletonSet, IntervalArray],
                   V0: Optional[IntervalArray] = None,
                   W0: Optional[IntervalArray] = None) -> None:
        if self.current is not None:
            raise IntegrationError("Integrator ist bereits initialisiert (einmalige Verwendung)")
        if not isinstance(initial, DoubletonSet):
            initial = DoubletonSet.from_box(initial)
        n = initial.dimension
        if n != self.system.dimension:
            raise IntegrationError(f"Dimension {n} passt nicht zum System ({self.system.dimension})")
        self.current = initial
        if self.derivative_order >= 1:
            if V0 is None:
                V0 = IntervalArray(np.eye(n))
            if self.derivative_order >= 2 and W0 is None:
                W0 = IntervalArray.zeros((n,) + V0.shape[1:] * 2)
            self.variations = VariationSet.from_enclosure(
                V0, W0 if self.derivative_order >= 2 else None)

    # Schrittweite und Validierung ----------------------------------------

    def _step_size(self, coeffs: List[IntervalArray]) -> float:
        cfg = self.config
        p = cfg.taylor_order
        candidates = []
        for k in (p, p - 1):
            norm = float(np.max(np.abs(coeffs[k].mid())))
            if norm > 0.0:
                candidates.append((cfg.tolerance / norm) ** (1.0 / k))
        h = cfg.safety * min(candidates) if candidates else cfg.max_step
        return min(max(h, cfg.min_step), cfg.max_step)

    def _rough_enclosure(self, hull_jets: TaylorJets, h: float):
        """Grobe Einschließung Z mit S + c_(p+1)(Z) [0,h]^(p+1) ⊆ Z

        Liefert (Jets über Z bis Ordnung p+1, Zustandsbild über [0,h]) oder None.
        """
        p = self.config.taylor_order
        t = Interval(0.0, h)
        tp = t ** (p + 1)
        parts = [_horner(hull_jets.state, t)]
        if hull_jets.V is not None:
            parts.append(_horner(hull_jets.V, t))
        if hull_jets.W is not None:
            parts.append(_horner(hull_jets.W, t))

        def loosen(box: IntervalArray, relative: float) -> IntervalArray:
            scale = 1e-13 * (1.0 + float(np.max(box.mag())))
            return box.inflate(absolute=scale, relative=relative)

        guess = [loosen(part, 0.1) for part in parts]
        for _ in range(self.config.max_inflations):
            jets = self.system.jets(
                guess[0], p + 1,
                V0=guess[1] if len(guess) > 1 else None,
                W0=guess[2] if len(guess) > 2 else None)
            remainders = [jets.state[-1]]
            if jets.V is not None:
                remainders.append(jets.V[-1])
            if jets.W is not None:
                remainders.append(jets.W[-1])
            images = [s + rem * tp for s, rem in zip(parts, remainders)]
            if all(img.subset(g) for img, g in zip(images, guess)):
                return jets, IntervalVector.coerce(images[0])
            guess = [loosen(g.hull(img), 1.0) for g, img in zip(guess, images)]
        return None

    def propose(self, h: Optional[float] = None, h_max: Optional[float] = None) -> TaylorStep:
        """Validierten Schritt berechnen, ohne die Menge fortzuschreiben"""
        if self.current is None:
            raise IntegrationError("Integrator nicht initialisiert")
        cfg = self.config
        p = cfg.taylor_order
        X = self.current
        n = X.dimension

        point_coeffs = self.system.jets(IntervalVector(X.center), p).state
        if h is None:
            h = self._step_size(point_coeffs)
        if h_max is not None:
            h = min(h, h_max)

        hull = X.hull()
        W0 = IntervalArray.zeros((n, n, n)) if self.derivative_order >= 2 else None
        hull_jets = self.system.jets(hull, p, V0=IntervalArray(np.eye(n)), W0=W0)

        while True:
            validated = self._rough_enclosure(hull_jets, h)
            if validated is not None:
                break
            if h * 0.5 < cfg.min_step:
                raise ValidationFailed(
                    f"Keine grobe Einschließung bei h={h:.3e} (Breite {hull.max_diam():.3e})")
            h *= 0.5
            self.logger.debug(f"Schrittweite halbiert: h={h:.3e}")

        rough, tube_bound = validated
        point_remainder = rough.state[-1]
        return TaylorStep(h, X, self.variations, point_coeffs, point_remainder,
                          hull_jets, rough, tube_bound)

    def commit(self, step: TaylorStep, t: Optional[Union[float, Interval]] = None) -> FlowEnclosure:
        """Menge um die Zeit t (Standard: h) fortschreiben"""
        if step.start is not self.current:
            raise IntegrationError("Schritt gehört nicht zur aktuellen Menge")
        t = Interval.coerce(step.h if t is None else t)
        X = self.current
        n = X.dimension

        A = step.flow_derivative(t)
        y = step.point_solution(t)
        AC = A @ IntervalMatrix(X.C)
        AB = A @ IntervalMatrix(X.B)
        if self.config.representation == "doubleton":
            C_new = A.mid() @ X.C
            Q = _orthonormal_basis(AB.mid(), X.r)
            Q_inv = _orthogonal_inverse(Q)
        else:
            C_new = np.zeros_like(X.C)
            Q = np.eye(n)
            Q_inv = IntervalMatrix.identity(n)

        u = y + (AC - C_new) @ X.r0
        center = u.mid()
        transfer = Q_inv @ AB
        r_new = transfer @ X.r + Q_inv @ (u - center)
        new_set = DoubletonSet(center=center, C=C_new, r0=X.r0, B=Q,
                               r=IntervalVector.coerce(r_new))

        monodromy = second = None
        if self.variations is not None:
            var = self.variations
            U = A @ IntervalMatrix(var.V_center)
            V_center = U.mid()
            R_new = transfer @ var.R + Q_inv @ (U - V_center)
            W_new = None
            if var.W is not None:
                W_new = _chain_second(A, step.flow_second(t), var.W, var.hull(X.B))
            self.variations = VariationSet(V_center=V_center, R=R_new, W=W_new)
            monodromy = IntervalMatrix.coerce(self.variations.hull(Q))
            second = W_new

        start_hull = X.hull()
        end_hull = new_set.hull()
        tube = step.tube.hull(start_hull).hull(end_hull)
        self.current = new_set
        self.time = self.time + t
        self.steps_taken += 1
        self._record_trace(t, end_hull)
        return FlowEnclosure(time_step=t, start=start_hull, end=end_hull,
                             tube=IntervalVector.coerce(tube),
                             monodromy=monodromy, second_variations=second)

    def advance(self, h_max: Optional[float] = None) -> FlowEnclosure:
        return self.commit(self.propose(h_max=h_max))

    def flow_to(self, t_target: float) -> List[FlowEnclosure]:
        """Schritte bis genau zur Zeit t_target (letzter Schritt verkürzt)"""
        if t_target <= 0.0:
            raise IntegrationError(f"t_target muss positiv sein, ist {t_target}")
        chain: List[FlowEnclosure] = []
        while True:
            remaining = Interval(t_target) - self.time
            if remaining.hi <= 0.0:
                break
            step = self.propose(h_max=remaining.hi)
            if step.h >= remaining.hi:
                chain.append(self.commit(step, Interval(max(remaining.lo, 0.0), remaining.hi)))
                break
            if step.h < self.config.min_step:
                raise StepUnderflow(f"Schrittweite {step.h:.3e} < min_step")
            chain.append(self.commit(step))
        self.write_trace()
        return chain

    # Diagnose --------------------------------------------------------------

    def _record_trace(self, t: Interval, end: IntervalVector) -> None:
        if self.config.trace_path:
            self._trace_rows.append([
                repr(self.time.hi), repr(t.hi), repr(float(np.max(end.diam()))),
                *[repr(float(d)) for d in end.diam()],
            ])

    def write_trace(self) -> None:
        if not self.config.trace_path or not self._trace_rows:
            return
        path = Path(self.config.trace_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        new_file = not path.exists()
        with open(path, "a", newline="") as f:
            writer = csv.writer(f)
            if new_file:
                dims = len(self._trace_rows[0]) - 3
                writer.writerow(["t", "h", "max_diam"] + [f"diam_{i}" for i in range(dims)])
            writer.writerows(self._trace_rows)
        self._trace_rows = []


# --------------------------------------------------------------------------
# Funktionale Schnittstelle
# --------------------------------------------------------------------------

def _prepare(s, p: Optional[ModelParams]):
    if isinstance(s, ExtendedState):
        return SwiftHohenbergSystem(extended=True), s.as_vector()
    if isinstance(s, SystemState):
        if p is None:
            raise IntegrationError("Parameter xi fehlt")
        return SwiftHohenbergSystem(extended=False, xi=p.xi), s.as_vector()
    vector = IntervalVector.coerce(s)
    if vector.shape[0] == 5:
        return SwiftHohenbergSystem(extended=True), vector
    if p is None:
        raise IntegrationError("Parameter xi fehlt")
    return SwiftHohenbergSystem(extended=False, xi=p.xi), vector


def make_integrator(s, p: Optional[ModelParams], cfg: IntegratorConfig,
                    order: int = 0, cubic: bool = True) -> TaylorIntegrator:
    system, vector = _prepare(s, p)
    system.cubic = cubic
    integrator = TaylorIntegrator(system, cfg, derivative_order=order)
    integrator.initialize(vector)
    return integrator


def step(s, p: Optional[ModelParams], cfg: IntegratorConfig, order: int = 0,
         h: Optional[float] = None) -> FlowEnclosure:
    """Ein zertifizierter Schritt"""
    integrator = make_integrator(s, p, cfg, order)
    result = integrator.commit(integrator.propose(h=h))
    integrator.write_trace()
    return result


def flow(s, p: Optional[ModelParams], t_target: float, cfg: IntegratorConfig,
         order: int = 0) -> List[FlowEnclosure]:
    """Kette von Schritten bis t_target; Variationen per Kettenregel"""
    return make_integrator(s, p, cfg, order).flow_to(t_target)


def energy_along(chain: List[FlowEnclosure], xi: Optional[Interval] = None) -> List[Interval]:
    """Energie-Einschließungen der Endzustände einer Schrittkette"""
    return [energy_of_vector(enc.end, xi) for enc in chain]
