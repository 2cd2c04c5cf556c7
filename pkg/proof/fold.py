#!/usr/bin/env python3
"""
Fold - Zertifizierung des Umkehrpunkts und Zusammenbau des Gesamtbeweises
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from dynamics.model import xi_to_alpha
from dynamics.odeint import IntegratorConfig
from dynamics.poincare import eval_G
from numerics.interval import Interval, IntervalMatrix, IntervalVector, ProverError
from proof.continuation import (
    CertifiedBranch,
    ConcavityResult,
    GlueResult,
    Indeterminate,
    SeparationResult,
    certify_concavity,
)
from proof.newton import NewtonOutcome, newton_2d, newton_2d_operator

logger = logging.getLogger(__name__)

DEFAULT_FOLD_RADIUS = 1e-10


class CertificateRefused(ProverError):
    """Ein Bestandteil des Gesamtbeweises fehlt oder ist nicht bewiesen"""


@dataclass
class FoldCertificate:
    xi_star: Optional[Interval]
    x_star: Optional[Interval]
    alpha_star: Optional[Interval]
    newton2d: NewtonOutcome
    seed: Tuple[float, float] = (0.0, 0.0)
    radius: float = DEFAULT_FOLD_RADIUS
    membership_segment: Optional[int] = None
    concavity_hull: Optional[Interval] = None
    slope_at_fold: Optional[Interval] = None
    glue: bool = False
    unique_maximum: bool = False

    @property
    def proven(self) -> bool:
        return self.newton2d.proven


def fold_jacobian_from_G(g) -> IntervalMatrix:
    """DH mit Zeilen (G_xi, G_x) und (G_xxi, G_xx) in den Variablen (xi, x)"""
    return IntervalMatrix.from_intervals([
        [g.d_dxi, g.d_dx],
        [g.d2_dxdxi, g.d2_dx2],
    ])


def locate_fold(seed: Tuple[float, float], radius: float = DEFAULT_FOLD_RADIUS,
                cfg: Optional[IntegratorConfig] = None,
                h_eval: Optional[Callable[[IntervalVector], Tuple[IntervalVector, IntervalMatrix]]] = None
                ) -> FoldCertificate:
    """Newton für H = (G, G_x) auf seed + [-1,1]^2 * radius"""
    xi0, x0 = float(seed[0]), float(seed[1])
    center = np.array([xi0, x0])
    box = IntervalVector([xi0, x0]).inflate(absolute=radius)

    if h_eval is not None:
        outcome = newton_2d(h_eval, box, center)
    else:
        cfg = cfg or IntegratorConfig()
        point = eval_G(Interval(xi0), Interval(x0), cfg, order=1)
        H0 = IntervalVector.of(point.value, point.d_dx)
        over_box = eval_G(box[0], box[1], cfg, order=2)
        outcome = newton_2d_operator(H0, fold_jacobian_from_G(over_box), box, center)

    fc = FoldCertificate(None, None, None, outcome, seed=(xi0, x0), radius=radius)
    if outcome.proven:
        fc.xi_star = outcome.refined[0]
        fc.x_star = outcome.refined[1]
        if fc.xi_star.lo > 0.0:
            fc.alpha_star = xi_to_alpha(fc.xi_star)
        logger.info(f"Fold bewiesen: xi*={fc.xi_star}, x*={fc.x_star}")
    else:
        logger.warning(f"Fold nicht bewiesen: {outcome.status.value} ({outcome.reason})")
    return fc


def certify_unique_maximum(fc: FoldCertificate, b_x: CertifiedBranch,
                           concavity: Optional[ConcavityResult] = None) -> FoldCertificate:
    """(xi*, x*) liegt in einer Segmentbox der xi~-Kette und xi~ ist konkav

    Ohne bewiesene Konkavität gibt es kein eindeutiges Maximum: Indeterminate.
    """
    if not fc.proven:
        raise Indeterminate("Fold nicht bewiesen")
    membership = None
    for index, seg in enumerate(b_x.segments):
        if fc.x_star.subset(seg.param_box) and fc.xi_star.subset(seg.solution_box):
            membership = index
            break
    if membership is None:
        raise Indeterminate(f"Fold ({fc.xi_star}, {fc.x_star}) in keinem Segment der xi~-Kette")

    DH = fc.newton2d.derivative_used
    G_xi, G_x = DH[0, 0], DH[0, 1]
    if G_xi.contains_zero():
        raise Indeterminate(f"G_xi = {G_xi} enthält 0 am Fold")
    fc.slope_at_fold = -(G_x / G_xi)

    if concavity is None:
        concavity = certify_concavity(b_x)
    fc.membership_segment = membership
    fc.concavity_hull = concavity.hull
    if not concavity.concave:
        raise Indeterminate(f"Konkavität von xi~ nicht bewiesen: Hülle {concavity.hull}")
    fc.unique_maximum = True
    return fc


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CertificateRefused(message)


def assemble_theorem(fc: FoldCertificate, b_minus: CertifiedBranch, b_plus: CertifiedBranch,
                     b_x: CertifiedBranch, separation: Optional[SeparationResult],
                     glue: Optional[GlueResult], run_config: Optional[Dict] = None) -> Dict:
    """Gesamtzertifikat; verweigert bei jedem fehlenden Bestandteil"""
    _require(fc is not None and fc.proven, "Fold-Newton nicht bewiesen")
    _require(fc.membership_segment is not None, "Fold nicht in der xi~-Kette verankert")
    _require(fc.unique_maximum and fc.concavity_hull is not None and fc.concavity_hull.hi < 0.0,
             "Konkavität von xi~ nicht bewiesen")
    _require(bool(separation), "Trennung x- < x+ nicht bewiesen")
    _require(bool(glue), "Verklebung der Parametrisierungen nicht bewiesen")
    fc.glue = True
    for branch in (b_minus, b_plus, b_x):
        try:
            branch.verify_chain()
        except Indeterminate as exc:
            raise CertificateRefused(str(exc)) from exc
        _require(branch.complete, f"Ast {branch.name} unvollständig")

    lower, upper = b_minus.endpoints[1], b_plus.endpoints[1]
    _require(lower.hi < fc.x_star.lo and fc.x_star.hi < upper.lo,
             "Fold liegt nicht strikt zwischen den Ast-Endpunkten")
    _require(fc.alpha_star is not None and fc.alpha_star == xi_to_alpha(fc.xi_star),
             "alpha* nicht aus xi* reproduzierbar")

    from proof.certificates import branch_summary, fold_to_record

    claims = [
        f"Äste {b_minus.name} und {b_plus.name} existieren als glatte Kurven auf {b_minus.range}",
        f"Beide Äste verkleben mit xi~ (Segmente {glue.witnesses})",
        "xi~ ist konkav und hat am Fold ein eindeutiges Maximum",
        "Geometrische Bedingungen gelten in jedem Segment",
        "Umkehrpunkt in alpha-Koordinaten über alpha = 1 + 4/xi^2",
        "Nichtdegeneriertheit: G = G_x = 0 in eindeutigem Punkt, G_xi != 0, xi~ konkav",
    ]
    return {
        "kind": "master",
        "claims": claims,
        "fold": fold_to_record(fc),
        "branches": {
            b.name: branch_summary(b) for b in (b_minus, b_plus, b_x)
        },
        "separation": {
            "lower_end": separation.lower_end.to_record(),
            "upper_end": separation.upper_end.to_record(),
            "argument": separation.argument,
        },
        "glue": {"xi_star": glue.xi_star.hex(), "witnesses": glue.witnesses},
        "config": run_config or {},
    }
