#!/usr/bin/env python3
"""
Zertifikate - JSON-Schreiber und -Leser für Äste, Fold und Gesamtbeweis
Intervallgrenzen werden bit-exakt als Hex-Floats abgelegt; gleiche
Konfiguration ergibt byte-identische Dateien.
"""

import csv
import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

from dynamics.poincare import GeometryReport
from numerics.interval import Interval, IntervalArray, IntervalMatrix, IntervalVector
from proof.continuation import BranchSegment, CertifiedBranch, Orientation
from proof.fold import FoldCertificate
from proof.newton import NewtonOutcome, NewtonStatus

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
TOOL_VERSION = "1.0.0"


class CertificateFormatError(ValueError):
    """Zertifikatsdatei entspricht nicht dem Schema"""


def canonical_json(record: Dict) -> str:
    return json.dumps(record, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def config_hash(config: Dict) -> str:
    text = json.dumps(config, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _stamp(record: Dict, config: Optional[Dict]) -> Dict:
    record["schema_version"] = SCHEMA_VERSION
    record["tool_version"] = TOOL_VERSION
    if config is not None:
        record["config"] = config
        record["config_hash"] = config_hash(config)
    return record


def write_certificate(path: Union[str, Path], record: Dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(canonical_json(record))
    logger.info(f"Zertifikat geschrieben: {path}")
    return path


def read_certificate(path: Union[str, Path]) -> Dict:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        record = json.load(f)
    if record.get("schema_version") != SCHEMA_VERSION:
        raise CertificateFormatError(
            f"{path}: Schema {record.get('schema_version')} statt {SCHEMA_VERSION}")
    return record


# --------------------------------------------------------------------------
# Hilfsfunktionen
# --------------------------------------------------------------------------

def _iv(value: Optional[Interval]):
    return value.to_record() if value is not None else None


def _from_iv(record) -> Optional[Interval]:
    return Interval.from_record(record) if record is not None else None


def _array_from(record, cls):
    if record is None:
        return None
    return cls.coerce(IntervalArray.from_record(record))


def newton_to_record(outcome: NewtonOutcome) -> Dict:
    return outcome.to_record()


def newton_from_record(record: Dict) -> NewtonOutcome:
    def box(value):
        if value is None:
            return None
        if isinstance(value, dict):
            return Interval.from_record(value)
        return IntervalVector.coerce(IntervalArray.from_record(value))

    return NewtonOutcome(
        status=NewtonStatus(record["status"]),
        refined=box(record["refined"]),
        uniqueness_box=box(record["uniqueness_box"]),
        derivative_used=_array_from(record["derivative_used"], IntervalMatrix),
        reason=record.get("reason", ""),
    )


def geometry_from_record(record: Optional[Dict]) -> Optional[GeometryReport]:
    if record is None:
        return None
    return GeometryReport(passed=record["passed"], x0=Interval.from_record(record["x0"]),
                          x1=Interval.from_record(record["x1"]),
                          x2=Interval.from_record(record["x2"]))


# --------------------------------------------------------------------------
# Äste
# --------------------------------------------------------------------------

def segment_to_record(index: int, seg: BranchSegment) -> Dict:
    return {
        "index": index,
        "param_box": seg.param_box.to_record(),
        "solution_box": seg.solution_box.to_record(),
        "newton": newton_to_record(seg.newton),
        "geometry": seg.geometry.to_dict() if seg.geometry else None,
        "implicit_slope": _iv(seg.implicit_slope),
        "second_derivative": _iv(seg.second_derivative),
        "partials": {k: v.to_record() for k, v in sorted(seg.partials.items())},
    }


def segment_from_record(record: Dict) -> BranchSegment:
    return BranchSegment(
        param_box=Interval.from_record(record["param_box"]),
        solution_box=Interval.from_record(record["solution_box"]),
        newton=newton_from_record(record["newton"]),
        geometry=geometry_from_record(record.get("geometry")),
        implicit_slope=_from_iv(record.get("implicit_slope")),
        second_derivative=_from_iv(record.get("second_derivative")),
        partials={k: Interval.from_record(v) for k, v in record.get("partials", {}).items()},
    )


def branch_summary(branch: CertifiedBranch) -> Dict:
    start, end = branch.endpoints
    return {
        "name": branch.name,
        "orientation": branch.orientation.value,
        "range": branch.range.to_record(),
        "segment_count": len(branch.segments),
        "endpoints": [_iv(start), _iv(end)],
        "chain": branch.chain_report(),
        "complete": branch.complete,
    }


def branch_to_record(branch: CertifiedBranch, config: Optional[Dict] = None) -> Dict:
    record = {"kind": "branch", **branch_summary(branch),
              "segments": [segment_to_record(i, s) for i, s in enumerate(branch.segments)]}
    return _stamp(record, config)


def branch_from_record(record: Dict) -> CertifiedBranch:
    if record.get("kind") != "branch":
        raise CertificateFormatError(f"Kein Ast-Zertifikat: {record.get('kind')}")
    start, end = record["endpoints"]
    return CertifiedBranch(
        name=record["name"],
        orientation=Orientation(record["orientation"]),
        range=Interval.from_record(record["range"]),
        segments=[segment_from_record(s) for s in record["segments"]],
        endpoints=(_from_iv(start), _from_iv(end)),
        complete=record.get("complete", True),
    )


def load_branch(path: Union[str, Path]) -> CertifiedBranch:
    return branch_from_record(read_certificate(path))


# --------------------------------------------------------------------------
# Fold
# --------------------------------------------------------------------------

def fold_to_record(fc: FoldCertificate) -> Dict:
    return {
        "xi_star": _iv(fc.xi_star),
        "x_star": _iv(fc.x_star),
        "alpha_star": _iv(fc.alpha_star),
        "newton2d": newton_to_record(fc.newton2d),
        "seed": [fc.seed[0].hex(), fc.seed[1].hex()],
        "radius": fc.radius.hex(),
        "membership_segment": fc.membership_segment,
        "concavity_hull": _iv(fc.concavity_hull),
        "slope_at_fold": _iv(fc.slope_at_fold),
        "glue": fc.glue,
        "unique_maximum": fc.unique_maximum,
    }


def fold_certificate_record(fc: FoldCertificate, config: Optional[Dict] = None) -> Dict:
    return _stamp({"kind": "fold", **fold_to_record(fc)}, config)


def fold_from_record(record: Dict) -> FoldCertificate:
    return FoldCertificate(
        xi_star=_from_iv(record["xi_star"]),
        x_star=_from_iv(record["x_star"]),
        alpha_star=_from_iv(record["alpha_star"]),
        newton2d=newton_from_record(record["newton2d"]),
        seed=(float.fromhex(record["seed"][0]), float.fromhex(record["seed"][1])),
        radius=float.fromhex(record["radius"]),
        membership_segment=record.get("membership_segment"),
        concavity_hull=_from_iv(record.get("concavity_hull")),
        slope_at_fold=_from_iv(record.get("slope_at_fold")),
        glue=record.get("glue", False),
        unique_maximum=record.get("unique_maximum", False),
    )


def master_certificate_record(master: Dict, config: Optional[Dict] = None) -> Dict:
    return _stamp(dict(master), config)


# --------------------------------------------------------------------------
# CSV für Diagramme
# --------------------------------------------------------------------------

def branch_rows(branch: CertifiedBranch) -> Iterable[List]:
    """Zeilen (branch, xi_mid, x_mid, xi_width, x_width)"""
    for seg in branch.segments:
        if branch.orientation is Orientation.PARAM_IS_XI:
            xi_box, x_box = seg.param_box, seg.refined
        else:
            xi_box, x_box = seg.refined, seg.param_box
        yield [branch.name, repr(xi_box.mid), repr(x_box.mid),
               repr(xi_box.diam), repr(x_box.diam)]


def write_branch_csv(branches: Iterable[CertifiedBranch], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["branch", "xi_mid", "x_mid", "xi_width", "x_width"])
        for branch in branches:
            writer.writerows(branch_rows(branch))
    logger.info(f"Diagramm-Daten geschrieben: {path}")
    return path
