#!/usr/bin/env python3
"""
Fortsetzung - Zertifizierung von Lösungskurven per adaptiver Unterteilung
Segmentweise parametrisierter Intervall-Newton, Kettenprüfung, Trennung der
Äste, Konkavität der Kurve xi~(x) und Verklebung der Parametrisierungen.
"""

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

from dynamics.odeint import IntegratorConfig
from dynamics.poincare import GeometryIndeterminate, GeometryReport, check_geometry, eval_G
from numerics.interval import EMPTY, Interval, ProverError
from proof.newton import NewtonOutcome, NewtonStatus, newton_operator

logger = logging.getLogger(__name__)


class Orientation(Enum):
    PARAM_IS_XI = "param-is-xi"
    PARAM_IS_X = "param-is-x"


class CannotAdvance(ProverError):
    """Segmentbreite unter der Mindestbreite; enthält den bisherigen Ast"""

    def __init__(self, message: str, partial: Optional["CertifiedBranch"] = None):
        super().__init__(message)
        self.partial = partial


class Indeterminate(ProverError):
    """Eine Prüfung (Trennung, Verklebung, Kette) ist nicht entscheidbar"""


@dataclass
class ContinuationPolicy:
    initial_fraction: float = 1.0 / 1024.0
    growth: float = 1.5
    max_fraction: float = 1.0 / 16.0
    inflation: float = 2.0
    initial_radius: float = 1e-7
    min_fraction: float = 1e-12
    slope_margin: float = 0.5
    wave_size: int = 4
    threads: int = 1
    log_every: int = 100
    intersect_direct: bool = False


@dataclass
class SegmentEvaluation:
    """Einschließungen eines Segments Z×X

    residual   ⊇ f(Z, x0)
    derivative ⊇ f_u(Z×X)   (Ableitung nach der Unbekannten)
    slope      ⊇ f_p(Z×X)   (Ableitung nach dem Parameter)
    second     ⊇ (f_pp, f_pu, f_uu) über Z×X, falls angefordert
    """
    residual: Interval
    derivative: Interval
    slope: Interval
    geometry: Optional[GeometryReport] = None
    second: Optional[Tuple[Interval, Interval, Interval]] = None


@dataclass
class BranchSegment:
    param_box: Interval
    solution_box: Interval
    newton: NewtonOutcome
    geometry: Optional[GeometryReport] = None
    implicit_slope: Optional[Interval] = None
    second_derivative: Optional[Interval] = None
    partials: Dict[str, Interval] = field(default_factory=dict)

    @property
    def refined(self) -> Interval:
        return self.newton.refined


@dataclass
class CertifiedBranch:
    name: str
    orientation: Orientation
    range: Interval
    segments: List[BranchSegment]
    endpoints: Tuple[Optional[Interval], Optional[Interval]] = (None, None)
    complete: bool = True

    def chain_report(self) -> Dict[str, object]:
        """Strukturelle Invarianten der Segmentkette"""
        shared, intersecting, nested = True, True, True
        for prev, nxt in zip(self.segments, self.segments[1:]):
            shared &= prev.param_box.hi == nxt.param_box.lo
            intersecting &= prev.solution_box.intersects(nxt.solution_box)
            nested &= prev.refined.subset(nxt.solution_box)
        covers = bool(self.segments) and (
            self.segments[0].param_box.lo == self.range.lo
            and self.segments[-1].param_box.hi == self.range.hi)
        proven = all(s.newton.proven for s in self.segments)
        geometry = all(s.geometry is None or s.geometry.passed for s in self.segments)
        return {
            "shared_endpoints": shared,
            "solution_boxes_intersect": intersecting,
            "refined_nested": nested,
            "covers_range": covers,
            "all_proven": proven,
            "geometry_passed": geometry,
        }

    def verify_chain(self) -> None:
        report = self.chain_report()
        failed = [k for k, v in report.items() if not v]
        if failed:
            raise Indeterminate(f"Kette von {self.name} verletzt: {', '.join(failed)}")


# --------------------------------------------------------------------------
# Beweisfunktionen
# --------------------------------------------------------------------------

class SwiftHohenbergProblem:
    """Segment-Auswertung über G (Parameter xi) bzw. G-quer (Parameter x)"""

    def __init__(self, orientation: Orientation, integrator: IntegratorConfig,
                 second_order: bool = False, intersect_direct: bool = False):
        self.logger = logging.getLogger(__name__)
        self.orientation = orientation
        self.integrator = integrator
        self.second_order = second_order
        self.intersect_direct = intersect_direct
        self.evaluations = 0
        self._lock = threading.Lock()

    def _G(self, param: Interval, unknown: Interval, order: int):
        with self._lock:
            self.evaluations += 1
        if self.orientation is Orientation.PARAM_IS_XI:
            return eval_G(param, unknown, self.integrator, order)
        return eval_G(unknown, param, self.integrator, order)

    def _split_partials(self, g):
        if self.orientation is Orientation.PARAM_IS_XI:
            derivative, slope = g.d_dx, g.d_dxi
            second = (g.d2_dxi2, g.d2_dxdxi, g.d2_dx2) if g.d2 else None
        else:
            derivative, slope = g.d_dxi, g.d_dx
            second = (g.d2_dx2, g.d2_dxdxi, g.d2_dxi2) if g.d2 else None
        return derivative, slope, second

    def evaluate(self, param_box: Interval, solution_box: Interval, x0: float) -> SegmentEvaluation:
        order = 2 if self.second_order else 1
        box = self._G(param_box, solution_box, order)
        geometry = check_geometry(box)
        derivative, slope, second = self._split_partials(box)

        p_mid = param_box.mid
        point = self._G(Interval(p_mid), Interval(x0), 0)
        residual = point.value + slope * (param_box - p_mid)
        if self.intersect_direct:
            direct = self._G(param_box, Interval(x0), 0).value
            narrowed = residual.intersect(direct)
            residual = narrowed if narrowed is not EMPTY else residual
        return SegmentEvaluation(residual, derivative, slope, geometry, second)

    def residual_at(self, param: float, x0: float) -> Interval:
        return self._G(Interval(param), Interval(x0), 0).value

    def derivative_over(self, param: float, X: Interval) -> Interval:
        g = self._G(Interval(param), X, 1)
        return self._split_partials(g)[0]

    def slope_at(self, param: float, x0: float) -> float:
        """Näherung von u'(p) = -f_p/f_u im Punkt, nur für die Vorhersage"""
        derivative, slope, _ = self._split_partials(self._G(Interval(param), Interval(x0), 1))
        if derivative.contains_zero():
            return 0.0
        return (-(slope / derivative)).mid


class SyntheticProblem:
    """Testmodell mit geschlossenen Intervall-Ausdrücken f(p,u), f_u, f_p"""

    def __init__(self, f: Callable[[Interval, Interval], Interval],
                 f_u: Callable[[Interval, Interval], Interval],
                 f_p: Callable[[Interval, Interval], Interval],
                 second: Optional[Callable[[Interval, Interval], Tuple[Interval, Interval, Interval]]] = None):
        self.f, self.f_u, self.f_p, self.second = f, f_u, f_p, second
        self.evaluations = 0
        self._lock = threading.Lock()

    def evaluate(self, param_box: Interval, solution_box: Interval, x0: float) -> SegmentEvaluation:
        with self._lock:
            self.evaluations += 1
        second = self.second(param_box, solution_box) if self.second else None
        return SegmentEvaluation(
            residual=self.f(param_box, Interval(x0)),
            derivative=self.f_u(param_box, solution_box),
            slope=self.f_p(param_box, solution_box),
            second=second,
        )

    def residual_at(self, param: float, x0: float) -> Interval:
        return self.f(Interval(param), Interval(x0))

    def derivative_over(self, param: float, X: Interval) -> Interval:
        return self.f_u(Interval(param), X)

    def slope_at(self, param: float, x0: float) -> float:
        p, u = Interval(param), Interval(x0)
        derivative = self.f_u(p, u)
        if derivative.contains_zero():
            return 0.0
        return (-(self.f_p(p, u) / derivative)).mid


# --------------------------------------------------------------------------
# Fortsetzung
# --------------------------------------------------------------------------

@dataclass
class _Plan:
    param_box: Interval
    solution_box: Interval
    center: float


@dataclass
class _Anchor:
    """Vorhersage u(p) ~ value + slope (p - param) + curvature (p - param)^2 / 2"""
    param: float
    value: float
    slope: float
    curvature: float = 0.0

    def at(self, p: float) -> float:
        d = p - self.param
        return self.value + self.slope * d + 0.5 * self.curvature * d * d

    def span(self, lo: float, hi: float) -> Interval:
        d = Interval(lo, hi) - self.param
        return self.value + self.slope * d + (0.5 * self.curvature) * d.sqr()


@dataclass
class _Attempt:
    plan: _Plan
    outcome: Optional[NewtonOutcome]
    evaluation: Optional[SegmentEvaluation]
    failure: str = ""


def implicit_second_derivative(evaluation: SegmentEvaluation) -> Tuple[Interval, Interval]:
    """u' = -f_p/f_u und u'' = -(f_pp + 2 f_pu u' + f_uu u'^2)/f_u"""
    f_pp, f_pu, f_uu = evaluation.second
    slope = -(evaluation.slope / evaluation.derivative)
    curvature = -((f_pp + 2.0 * f_pu * slope + f_uu * slope.sqr()) / evaluation.derivative)
    return slope, curvature


class BranchContinuation:
    """Adaptive Überdeckung eines Parameterbereichs mit bewiesenen Segmenten"""

    def __init__(self, problem, policy: Optional[ContinuationPolicy] = None, name: str = "branch",
                 orientation: Orientation = Orientation.PARAM_IS_XI):
        self.logger = logging.getLogger(__name__)
        self.problem = problem
        self.policy = policy or ContinuationPolicy()
        self.name = name
        self.orientation = orientation
        self.statistics = {"attempts": 0, "defect": 0, "inconclusive": 0, "geometry": 0}

    # Vorhersage ----------------------------------------------------------------

    @staticmethod
    def _slope_of(segment: BranchSegment) -> float:
        return segment.implicit_slope.mid if segment.implicit_slope is not None else 0.0

    def _seed_slope(self, param: float, seed: float) -> float:
        slope_at = getattr(self.problem, "slope_at", None)
        if slope_at is None:
            return 0.0
        try:
            slope = slope_at(param, seed)
        except ProverError as exc:
            self.logger.warning(f"{self.name}: keine Seed-Steigung bei p={param!r} ({exc})")
            return 0.0
        self.logger.debug(f"{self.name}: Seed-Steigung {slope!r}")
        return slope

    def _anchor(self, segments: List[BranchSegment], start: float, seed: float,
                seed_slope: float) -> _Anchor:
        if not segments:
            return _Anchor(start, seed, seed_slope)
        last = segments[-1]
        slope = self._slope_of(last)
        if last.second_derivative is not None:
            curvature = last.second_derivative.mid
        elif len(segments) > 1:
            prev = segments[-2]
            dp = last.param_box.mid - prev.param_box.mid
            curvature = (slope - self._slope_of(prev)) / dp if dp > 0.0 else 0.0
        else:
            curvature = 0.0
        return _Anchor(last.param_box.mid, last.refined.mid, slope, curvature)

    def _plan_wave(self, segments: List[BranchSegment], anchor: _Anchor, start: float,
                   width: float, radius: float, end: float) -> List[_Plan]:
        """Segmente einer Welle; X_j deckt die Vorhersage über Z_{j-1} ∪ Z_j ab"""
        plans: List[_Plan] = []
        lo = start
        span_lo = segments[-1].param_box.lo if segments else start
        for _ in range(max(1, self.policy.wave_size)):
            if lo >= end:
                break
            hi = min(lo + width, end)
            if end - hi < 0.25 * width:
                hi = end
            margin = radius + self.policy.slope_margin * abs(anchor.slope) * (hi - lo)
            box = anchor.span(span_lo, hi).inflate(margin)
            if segments and not plans:
                box = box.hull(segments[-1].refined)
            plans.append(_Plan(Interval(lo, hi), box, anchor.at(0.5 * (lo + hi))))
            span_lo = lo
            lo = hi
        return plans

    def _attempt(self, plan: _Plan) -> _Attempt:
        X = plan.solution_box
        x0 = plan.center if X.lo < plan.center < X.hi else X.mid
        try:
            evaluation = self.problem.evaluate(plan.param_box, X, x0)
        except GeometryIndeterminate as exc:
            return _Attempt(plan, None, None, failure=f"geometry: {exc}")
        except ProverError as exc:
            return _Attempt(plan, None, None, failure=f"integration: {exc}")
        outcome = newton_operator(evaluation.residual, evaluation.derivative, X, x0)
        return _Attempt(plan, outcome, evaluation)

    def _segment(self, attempt: _Attempt) -> BranchSegment:
        ev = attempt.evaluation
        slope = None
        curvature = None
        partials = {"residual": ev.residual, "f_u": ev.derivative, "f_p": ev.slope}
        if not ev.derivative.contains_zero():
            slope = -(ev.slope / ev.derivative)
        if ev.second is not None:
            slope, curvature = implicit_second_derivative(ev)
            partials.update({"f_pp": ev.second[0], "f_pu": ev.second[1], "f_uu": ev.second[2]})
        return BranchSegment(
            param_box=attempt.plan.param_box,
            solution_box=attempt.plan.solution_box,
            newton=attempt.outcome,
            geometry=ev.geometry,
            implicit_slope=slope,
            second_derivative=curvature,
            partials=partials,
        )

    # Hauptschleife ------------------------------------------------------------

    def run(self, param_range: Interval, seed: float,
            seed_slope: Optional[float] = None) -> CertifiedBranch:
        """Überdeckung ab (lo, seed); ohne seed_slope wird u'(lo) am Seed ausgewertet"""
        policy = self.policy
        lo, hi = param_range.lo, param_range.hi
        length = hi - lo
        if length <= 0.0:
            raise ValueError(f"Leerer Parameterbereich {param_range}")
        width = length * policy.initial_fraction
        max_width = length * policy.max_fraction
        min_width = length * policy.min_fraction
        radius = policy.initial_radius
        inflated = False
        segments: List[BranchSegment] = []
        position = lo
        started = time.time()

        if seed_slope is None:
            seed_slope = self._seed_slope(lo, seed)

        self.logger.info(f"Fortsetzung {self.name} auf [{lo!r}, {hi!r}] gestartet")
        with ThreadPoolExecutor(max_workers=max(1, policy.threads)) as executor:
            while position < hi:
                if width < min_width:
                    partial = CertifiedBranch(self.name, self.orientation, param_range,
                                              segments, complete=False)
                    raise CannotAdvance(
                        f"{self.name}: Segmentbreite {width:.3e} bei p={position!r} zu klein",
                        partial)
                anchor = self._anchor(segments, lo, seed, seed_slope)
                plans = self._plan_wave(segments, anchor, position, width, radius, hi)
                attempts = list(executor.map(self._attempt, plans))
                self.statistics["attempts"] += len(attempts)

                failure = None
                for attempt in attempts:
                    failure = self._accept(attempt, segments)
                    if failure is not None:
                        break
                    position = attempt.plan.param_box.hi
                    inflated = False
                    if len(segments) % policy.log_every == 0:
                        self.logger.info(
                            f"{self.name}: {len(segments)} Segmente, p={position:.12g}, "
                            f"Breite {width:.3e}")

                if failure is None:
                    width = min(width * policy.growth, max_width)
                elif failure == "inconclusive" and not inflated:
                    radius *= policy.inflation
                    inflated = True
                else:
                    width *= 0.5
                    inflated = False
                    if failure == "defect":
                        radius = max(policy.initial_radius, radius / policy.inflation)

        branch = CertifiedBranch(self.name, self.orientation, param_range, segments)
        branch.endpoints = (self.endpoint(segments[0], lo), self.endpoint(segments[-1], hi))
        self.logger.info(f"Fortsetzung {self.name} abgeschlossen: {len(segments)} Segmente "
                         f"in {time.time() - started:.1f}s")
        return branch

    def _accept(self, attempt: _Attempt, segments: List[BranchSegment]) -> Optional[str]:
        """None bei Annahme, sonst Fehlerklasse für die Schrittweitensteuerung"""
        if attempt.outcome is None:
            kind = attempt.failure.split(":", 1)[0]
            self.statistics[kind] = self.statistics.get(kind, 0) + 1
            self.logger.debug(f"{self.name}: {attempt.failure} auf {attempt.plan.param_box}")
            return kind
        status = attempt.outcome.status
        if status is NewtonStatus.DEFECT:
            self.statistics["defect"] += 1
            return "defect"
        if status is NewtonStatus.INCONCLUSIVE:
            self.statistics["inconclusive"] += 1
            return "inconclusive"
        if segments:
            prev = segments[-1]
            if not (prev.refined.subset(attempt.plan.solution_box)
                    and prev.solution_box.intersects(attempt.plan.solution_box)):
                self.statistics["inconclusive"] += 1
                return "inconclusive"
        segments.append(self._segment(attempt))
        return None

    def endpoint(self, segment: BranchSegment, param: float) -> Interval:
        """Einschließung der Kurve bei festem Parameter (iterierter Punkt-Newton)

        Rückfall ist die Segment-Einschließung N, die den Graphen über der
        ganzen Parameterbox enthält.
        """
        X = segment.refined
        X = X.inflate(0.5 * X.rad + 4e-16 * abs(X.mid))
        enclosure: Optional[Interval] = None
        for _ in range(6):
            x0 = X.mid
            outcome = newton_operator(self.problem.residual_at(param, x0),
                                      self.problem.derivative_over(param, X), X, x0)
            if not outcome.proven:
                break
            refined = outcome.refined
            if enclosure is not None:
                shrinking = refined.diam < 0.99 * enclosure.diam
                refined = refined.intersect(enclosure) or refined
                enclosure = refined
                if not shrinking:
                    break
            else:
                enclosure = refined
            X = refined.inflate(0.1 * refined.rad + 4e-16 * abs(refined.mid))
        return enclosure if enclosure is not None else segment.refined


def certify_branch(param_range: Interval, seed: float, orientation: Orientation,
                   integrator: Optional[IntegratorConfig] = None,
                   policy: Optional[ContinuationPolicy] = None,
                   problem=None, name: str = "branch",
                   second_order: bool = False) -> CertifiedBranch:
    """Überdeckung des Bereichs mit bewiesenen Segmenten ab der Näherung seed"""
    policy = policy or ContinuationPolicy()
    if problem is None:
        problem = SwiftHohenbergProblem(orientation, integrator or IntegratorConfig(),
                                        second_order=second_order,
                                        intersect_direct=policy.intersect_direct)
    return BranchContinuation(problem, policy, name, orientation).run(
        Interval.coerce(param_range), seed)


# --------------------------------------------------------------------------
# Folgerungen aus den zertifizierten Ästen
# --------------------------------------------------------------------------

@dataclass
class SeparationResult:
    separated: bool
    lower_end: Interval
    upper_end: Interval
    argument: List[str]

    def __bool__(self):
        return self.separated


def verify_separation(b_minus: CertifiedBranch, b_plus: CertifiedBranch) -> SeparationResult:
    """x-(xi*) < x+(xi*) am Endpunkt; Eindeutigkeit verhindert Berührung im Inneren"""
    if b_minus.range != b_plus.range:
        raise Indeterminate("Äste über verschiedenen Parameterbereichen")
    for branch in (b_minus, b_plus):
        if not branch.complete:
            raise Indeterminate(f"Ast {branch.name} unvollständig")
        branch.verify_chain()
    lower, upper = b_minus.endpoints[1], b_plus.endpoints[1]
    if lower is None or upper is None or not lower.hi < upper.lo:
        raise Indeterminate(f"Endpunkte nicht getrennt: {lower} / {upper}")
    argument = [
        f"{b_minus.name}(p_end) ⊂ {lower} < {upper} ⊃ {b_plus.name}(p_end)",
        "Beide Ketten bestehen aus bewiesenen Newton-Segmenten (eindeutige Nullstelle je Segmentbox)",
        "Ein Berührpunkt läge in einer Segmentbox beider Äste und widerspräche dort der Eindeutigkeit",
        "Stetigkeit der Kurven ergibt die Trennung auf dem ganzen Bereich",
    ]
    return SeparationResult(True, lower, upper, argument)


@dataclass
class ConcavityResult:
    hull: Interval
    concave: bool
    per_segment: List[Interval]

    def __bool__(self):
        return self.concave


def certify_concavity(branch: CertifiedBranch) -> ConcavityResult:
    """Hülle der impliziten zweiten Ableitung über alle Segmente"""
    if branch.orientation is not Orientation.PARAM_IS_X:
        raise Indeterminate("Konkavität wird für die Parametrisierung über x geprüft")
    values: List[Interval] = []
    for i, seg in enumerate(branch.segments):
        if seg.second_derivative is None:
            raise Indeterminate(f"Segment {i} ohne zweite Ableitungen")
        if seg.partials["f_u"].contains_zero():
            raise Indeterminate(f"Segment {i}: G_xi enthält 0 (Defect)")
        values.append(seg.second_derivative)
    hull = Interval.hull_of(values)
    return ConcavityResult(hull=hull, concave=hull.hi < 0.0, per_segment=values)


@dataclass
class GlueResult:
    passed: bool
    witnesses: Dict[str, int]
    xi_star: float

    def __bool__(self):
        return self.passed


def _membership(b_x: CertifiedBranch, xi_star: float, x_enclosure: Interval) -> Optional[int]:
    for index, seg in enumerate(b_x.segments):
        if x_enclosure.subset(seg.param_box) and seg.solution_box.contains(xi_star):
            return index
    return None


def glue_check(b_minus: CertifiedBranch, b_plus: CertifiedBranch, b_x: CertifiedBranch,
               xi_star: Optional[float] = None) -> GlueResult:
    """(xi*, x±(xi*)) in einer Segmentbox der xi~-Kette, also xi~(x±(xi*)) = xi*"""
    if xi_star is None:
        xi_star = b_minus.range.hi
    witnesses: Dict[str, int] = {}
    for label, branch in (("lower", b_minus), ("upper", b_plus)):
        end = branch.endpoints[1]
        index = _membership(b_x, xi_star, end) if end is not None else None
        if index is None:
            raise Indeterminate(f"Verklebung {label}: ({xi_star!r}, {end}) in keinem Segment")
        witnesses[label] = index
    return GlueResult(True, witnesses, xi_star)
