#!/usr/bin/env python3
"""
Poincaré-Abbildung - zertifizierte Schnitte mit y = 0
Schnittzeit per Vorzeichenwechsel über den Schritt-Schläuchen und
Intervall-Newton in der Zeit, Ableitungen erster und zweiter Ordnung der
Abbildung, sowie die skalare Beweisfunktion G(xi, x).
"""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from dynamics.model import (
    EXTENDED_DIM,
    X,
    XI,
    Y,
    W,
    Z,
    ModelParams,
    SwiftHohenbergSystem,
    SystemState,
    energy_of_vector,
    section_z,
)
from dynamics.odeint import (
    DoubletonSet,
    IntegratorConfig,
    TaylorIntegrator,
    TaylorStep,
)
from numerics.interval import (
    EMPTY,
    DomainError,
    Interval,
    IntervalArray,
    IntervalMatrix,
    IntervalVector,
    ProverError,
)

CROSSING_TIME_TOLERANCE = 1e-10
MAX_STEPS = 100000


class PoincareError(ProverError):
    """Fehler bei der Berechnung der Poincaré-Abbildung"""


class NonTransversalCrossing(PoincareError):
    """0 liegt in der z-Komponente am Schnitt"""


class LostEnclosure(PoincareError):
    """Vorzeichenwechsel von y nicht isolierbar"""


class GeometryIndeterminate(PoincareError):
    """Geometrische Bedingungen x0 < -1 < x2 < 1 < x1 nicht entscheidbar"""

    def __init__(self, message: str, report: Optional["GeometryReport"] = None):
        super().__init__(message)
        self.report = report


@dataclass
class CrossingResult:
    state: IntervalVector
    crossing_time: Interval
    transversal: bool
    extremum_x: Interval
    direction: int
    derivative: Optional[IntervalArray] = None
    second: Optional[IntervalArray] = None


@dataclass
class GEvaluation:
    value: Interval
    extrema: List[Interval]
    d_dx: Optional[Interval] = None
    d_dxi: Optional[Interval] = None
    d2: Optional[Tuple[Interval, Interval, Interval]] = None
    crossings: List[CrossingResult] = field(default_factory=list)

    @property
    def d2_dx2(self) -> Interval:
        return self.d2[0]

    @property
    def d2_dxdxi(self) -> Interval:
        return self.d2[1]

    @property
    def d2_dxi2(self) -> Interval:
        return self.d2[2]


@dataclass
class GeometryReport:
    passed: bool
    x0: Interval
    x1: Interval
    x2: Interval

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "x0": self.x0.to_record(),
            "x1": self.x1.to_record(),
            "x2": self.x2.to_record(),
        }


def _outer(u: IntervalArray, v: IntervalArray) -> IntervalArray:
    return u[:, None] * v[None, :]


def _sign(iv: Interval) -> int:
    if iv.lo > 0.0:
        return 1
    if iv.hi < 0.0:
        return -1
    return 0


class PoincareMap:
    """Schnitte einer Anfangsmenge mit Pi = {y = 0} in beiden Richtungen"""

    def __init__(self, system: SwiftHohenbergSystem, config: IntegratorConfig, order: int = 0):
        self.logger = logging.getLogger(__name__)
        self.system = system
        self.config = config
        self.order = order
        self.steps_taken = 0

    def run(self, initial: Union[DoubletonSet, IntervalArray], n_crossings: int,
            V0: Optional[IntervalArray] = None,
            W0: Optional[IntervalArray] = None) -> List[CrossingResult]:
        if n_crossings < 1:
            raise PoincareError("n_crossings muss >= 1 sein")
        integrator = TaylorIntegrator(self.system, self.config, derivative_order=self.order)
        integrator.initialize(initial, V0, W0)

        y_start = integrator.current.hull()[Y]
        if y_start.lo == 0.0 and y_start.hi == 0.0:
            on_section = True
        elif y_start.contains_zero():
            raise PoincareError(f"Startmenge schneidet den Schnitt (y = {y_start})")
        else:
            on_section = False
        sign = _sign(y_start)

        results: List[CrossingResult] = []
        while len(results) < n_crossings:
            if integrator.steps_taken >= MAX_STEPS:
                raise LostEnclosure(f"Kein Schnitt nach {MAX_STEPS} Schritten")
            step, crossing, sign = self._resolve(integrator, integrator.propose(), on_section, sign)
            if crossing:
                results.append(self._crossing(integrator, step))
            integrator.commit(step)
            on_section = False

        integrator.write_trace()
        self.steps_taken = integrator.steps_taken
        return results

    def _resolve(self, integrator: TaylorIntegrator, step: TaylorStep, on_section: bool,
                 start_sign: int) -> Tuple[TaylorStep, bool, int]:
        """Schritt so wählen, dass ein Vorzeichenwechsel von y entscheidbar ist

        start_sign ist das Vorzeichen von y am Ende des vorigen Schritts, nicht
        das der aktuellen Hülle: nach einem Schnitt kann die Hülle y = 0 enthalten.
        Liefert (Schritt, Schnitt ja/nein, Vorzeichen von y am Schrittende).
        """
        min_step = self.config.min_step
        fallbacks: Optional[List[float]] = None

        while True:
            tube = step.tube
            if not on_section and not tube[Y].contains_zero():
                return step, False, _sign(tube[Y])
            if tube[Z].contains_zero():
                if step.h * 0.5 < min_step:
                    raise NonTransversalCrossing(
                        f"z im Schlauch enthält 0 (z = {tube[Z]}) bei h={step.h:.3e}")
                step = integrator.propose(h=step.h * 0.5)
                continue

            end_sign = _sign(step.state_at(step.h)[Y])
            if end_sign != 0:
                if on_section:
                    return step, False, end_sign
                return step, end_sign != start_sign, end_sign

            if fallbacks is None:
                fallbacks = [1.5 * step.h, 0.5 * step.h]
            if not fallbacks:
                raise LostEnclosure(f"y am Schrittende enthält 0 (h={step.h:.3e})")
            step = integrator.propose(h=fallbacks.pop(0))

    def _crossing_time(self, step: TaylorStep) -> Interval:
        """Intervall-Newton auf t -> y(t) mit y' = z"""
        T = Interval(0.0, step.h)
        z_tube = step.tube[Z]
        for _ in range(60):
            t0 = T.mid
            y_t0 = step.state_at(t0)[Y]
            z_T = step.state_at(T)[Z].intersect(z_tube)
            if z_T is EMPTY:
                z_T = z_tube
            candidate = (t0 - y_t0 / z_T).intersect(T)
            if candidate is EMPTY:
                raise LostEnclosure(f"Newton in der Zeit leer auf {T}")
            improved = candidate.diam < 0.99 * T.diam
            T = candidate
            if T.diam <= CROSSING_TIME_TOLERANCE or not improved:
                break
        return T

    def _crossing(self, integrator: TaylorIntegrator, step: TaylorStep) -> CrossingResult:
        T = self._crossing_time(step)
        S = step.state_at(T)
        if S[Z].contains_zero():
            raise NonTransversalCrossing(f"Nicht transversaler Schnitt: z = {S[Z]}")
        projected = IntervalVector.coerce(S.with_item(Y, 0.0))
        result = CrossingResult(
            state=projected,
            crossing_time=integrator.time + T,
            transversal=True,
            extremum_x=S[X],
            direction=_sign(S[Z]),
        )
        if self.order >= 1:
            result.derivative, result.second = self._derivatives(step, T, S)
        self.logger.debug(f"Schnitt bei t={result.crossing_time}, x={result.extremum_x}")
        return result

    def _derivatives(self, step: TaylorStep, T: Interval, S: IntervalVector):
        """DP = V + f Dtau, D2P aus zweiten Variationen, Beschleunigung und D2tau"""
        V, Wv = step.variations_at(T)
        f = self.system.vector_field(S)
        fy = f[Y]
        dtau = -(V[Y] / fy)
        DP = V + _outer(f, dtau)
        DP = DP.with_item((Y, slice(None)), 0.0)

        D2P = None
        if self.order >= 2:
            Df = self.system.jacobian(S)
            DfV = Df @ V
            Dff = Df @ f
            g = DfV[Y]
            tt = _outer(dtau, dtau)
            numerator = Wv[Y] + _outer(g, dtau) + _outer(dtau, g) + Dff[Y] * tt
            d2tau = -(numerator / fy)
            D2P = (Wv
                   + DfV[:, :, None] * dtau[None, None, :]
                   + DfV[:, None, :] * dtau[None, :, None]
                   + Dff[:, None, None] * tt[None, :, :]
                   + f[:, None, None] * d2tau[None, :, :])
            D2P = D2P.with_item((Y, slice(None), slice(None)), 0.0)
        return DP, D2P


def poincare_map(s, p: Optional[ModelParams], n_crossings: int, cfg: IntegratorConfig,
                 order: int = 0) -> List[CrossingResult]:
    """Erste n Schnitte einer Zustands-Einschließung (4D mit p oder erweitert 5D)"""
    if isinstance(s, SystemState):
        vector = s.as_vector()
    else:
        vector = IntervalVector.coerce(s.as_vector() if hasattr(s, "as_vector") else s)
    if vector.shape[0] == EXTENDED_DIM:
        system = SwiftHohenbergSystem(extended=True)
    else:
        if p is None:
            raise PoincareError("Parameter xi fehlt")
        system = SwiftHohenbergSystem(extended=False, xi=p.xi)
    return PoincareMap(system, cfg, order).run(vector, n_crossings)


# --------------------------------------------------------------------------
# Beweisfunktion G
# --------------------------------------------------------------------------

def _sqrt2() -> Interval:
    return Interval(2.0).sqrt()


def initial_embedding(xi: Interval, x: Interval):
    """Anfangsmenge u(xi,x) = (x, 0, (x^2-1)/sqrt2, 0, xi) als Doubleton mit V0, W0

    Ableitungsrichtungen: Index 0 = x, Index 1 = xi.
    """
    xi, x = Interval.coerce(xi), Interval.coerce(x)
    xm, xim = x.mid, xi.mid
    sqrt2 = _sqrt2()

    u_mid = IntervalVector.of(xm, 0.0, section_z(Interval(xm)), 0.0, xim)
    center = u_mid.mid()
    C = np.zeros((EXTENDED_DIM, 2))
    C[X, 0] = 1.0
    C[Z, 0] = (sqrt2 * xm).mid
    C[XI, 1] = 1.0

    rows = [[Interval(0.0), Interval(0.0)] for _ in range(EXTENDED_DIM)]
    rows[X][0] = Interval(1.0)
    rows[Z][0] = sqrt2 * x
    rows[XI][1] = Interval(1.0)
    Du_box = IntervalMatrix.from_intervals(rows)

    r0 = IntervalVector.of(x - xm, xi - xim)
    r = (u_mid - center) + (Du_box - C) @ r0
    initial = DoubletonSet(center=center, C=C, r0=r0, B=np.eye(EXTENDED_DIM),
                           r=IntervalVector.coerce(r))

    W0 = IntervalArray.zeros((EXTENDED_DIM, 2, 2)).with_item((Z, 0, 0), sqrt2)
    return initial, Du_box, W0


def eval_G(xi: Interval, x: Interval, cfg: IntegratorConfig, order: int = 0,
           check_domain: bool = True) -> GEvaluation:
    """G(xi, x) = w-Komponente des zweiten Schnitts ab (x, 0, (x^2-1)/sqrt2, 0)"""
    xi, x = Interval.coerce(xi), Interval.coerce(x)
    if check_domain:
        if x.hi >= -1.0:
            raise DomainError(f"eval_G benötigt x < -1, erhalten {x}")
        ModelParams(xi).validate()

    initial, V0, W0 = initial_embedding(xi, x)
    pmap = PoincareMap(SwiftHohenbergSystem(extended=True), cfg, order)
    crossings = pmap.run(initial, 2, V0=V0 if order >= 1 else None,
                         W0=W0 if order >= 2 else None)
    second = crossings[1]
    result = GEvaluation(
        value=second.state[W],
        extrema=[x, crossings[0].extremum_x, second.extremum_x],
        crossings=crossings,
    )
    if order >= 1:
        result.d_dx = second.derivative[W, 0]
        result.d_dxi = second.derivative[W, 1]
    if order >= 2:
        D2 = second.second
        result.d2 = (D2[W, 0, 0], D2[W, 0, 1], D2[W, 1, 1])
    return result


def eval_G_bar(x: Interval, xi: Interval, cfg: IntegratorConfig, order: int = 0) -> GEvaluation:
    """G mit vertauschten Rollen: Unbekannte xi, Parameter x"""
    return eval_G(xi, x, cfg, order)


def check_geometry(g: Union[GEvaluation, Sequence[Interval]]) -> GeometryReport:
    """x0 < -1, x1 > 1, -1 < x2 < 1 mit strikten Intervall-Ungleichungen"""
    extrema = g.extrema if isinstance(g, GEvaluation) else list(g)
    if len(extrema) < 3:
        raise GeometryIndeterminate(f"Nur {len(extrema)} Extrema vorhanden")
    x0, x1, x2 = extrema[:3]
    passed = x0.hi < -1.0 and x1.lo > 1.0 and -1.0 < x2.lo and x2.hi < 1.0
    report = GeometryReport(passed=passed, x0=x0, x1=x1, x2=x2)
    if not passed:
        raise GeometryIndeterminate(
            f"Geometrie nicht entscheidbar: x0={x0}, x1={x1}, x2={x2}", report)
    return report


def crossing_energies(results: List[CrossingResult], xi: Optional[Interval] = None) -> List[Interval]:
    return [energy_of_vector(c.state, xi) for c in results]


def write_crossings_csv(results: List[CrossingResult], path: Union[str, Path]) -> None:
    """Diagnose: Folge der Schnitte als CSV"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["index", "t_mid", "t_width", "x_mid", "z_mid", "w_mid",
                         "x_width", "z_width", "w_width"])
        for i, c in enumerate(results):
            s = c.state
            writer.writerow([i, repr(c.crossing_time.mid), repr(c.crossing_time.diam),
                             repr(s[X].mid), repr(s[Z].mid), repr(s[W].mid),
                             repr(s[X].diam), repr(s[Z].diam), repr(s[W].diam)])
