#!/usr/bin/env python3
"""
Fold-Prover - Hauptprogramm
Orchestriert die Beweisschritte:
    step1  Äste x+ und x- über dem xi-Bereich, Endpunkte bei xi_*, Trennung
    step2  Kurve xi~(x) über X_* samt Konkavität
    step3  Umkehrpunkt (xi*, x*) per 2D-Newton, Eindeutigkeit des Maximums
    step4  Verklebung und Gesamtzertifikat
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from dynamics.model import XI_THRESHOLD, xi_to_alpha
from dynamics.odeint import IntegrationError
from dynamics.poincare import GeometryIndeterminate, PoincareError, eval_G, write_crossings_csv
from numerics.interval import Interval, ProverError
from proof.certificates import (
    CertificateFormatError,
    branch_to_record,
    fold_certificate_record,
    fold_from_record,
    load_branch,
    master_certificate_record,
    read_certificate,
    write_branch_csv,
    write_certificate,
)
from proof.continuation import (
    BranchContinuation,
    CannotAdvance,
    CertifiedBranch,
    Indeterminate,
    Orientation,
    SwiftHohenbergProblem,
    certify_concavity,
    glue_check,
    verify_separation,
)
from proof.fold import CertificateRefused, assemble_theorem, certify_unique_maximum, locate_fold
from prover import __version__
from prover.config_manager import COMMANDS, ConfigError, ConfigManager, RunConfig
from prover.seeds import SeedError, SeedGenerator
from prover.selftest import SelfTestRunner
from prover.utils.logger import setup_logging
from prover.utils.performance_monitor import PerformanceMonitor

# Referenz-Einschließungen für die Vergleiche in den Berichten
REFERENCE = {
    "x_plus_end": Interval(-1.5824440318327613, -1.58244403182912),
    "x_minus_end": Interval(-1.5825350627563035, -1.5825350627530319),
    "xi_tilde_second": Interval(-74010.849232287583, -12744.872650106316),
    "xi_star": Interval(2.0316516135613893, 2.0316516135814116),
    "x_star": Interval(-1.5824941113301776, -1.5824941112863635),
    "alpha_star": Interval(1.9690842080101989, 1.9690842080293001),
}
FOLD_WIDTH_LIMIT = 1e-9

FILES = {
    "upper": "branch_x_plus.json",
    "lower": "branch_x_minus.json",
    "endpoints": "endpoints_report.json",
    "xi_tilde": "branch_xi_tilde.json",
    "fold": "fold.json",
    "master": "master.json",
    "diagram": "diagram.csv",
    "run_report": "run_report.json",
    "selftest": "selftest_report.json",
}

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_NEWTON = 4
EXIT_GLUING = 5


class NewtonNotProven(ProverError):
    """Newton-Ergebnis Defect oder Inconclusive"""


class SelfTestFailed(ProverError):
    """Mindestens eine Eigenschafts-Suite ist fehlgeschlagen"""


def exit_code_for(exc: BaseException) -> int:
    """Fehlerklasse -> Exit-Code (spezifische Klassen zuerst)"""
    if isinstance(exc, (ConfigError, CertificateFormatError)):
        return EXIT_CONFIG
    if isinstance(exc, (Indeterminate, GeometryIndeterminate, CertificateRefused)):
        return EXIT_GLUING
    if isinstance(exc, (NewtonNotProven, CannotAdvance)):
        return EXIT_NEWTON
    if isinstance(exc, (IntegrationError, PoincareError, SeedError)):
        return EXIT_INTEGRATION
    return EXIT_UNEXPECTED


def _comparison(value: Optional[Interval], reference: Interval) -> Dict:
    return {
        "value": value.to_record() if value is not None else None,
        "reference": reference.to_record(),
        "intersects": bool(value is not None and value.intersects(reference)),
    }


class ProofPipeline:
    """Führt die Beweisschritte aus und schreibt die Zertifikate"""

    def __init__(self, config: RunConfig, monitor: Optional[PerformanceMonitor] = None):
        self.logger = logging.getLogger(__name__)
        self.config = config
        self.monitor = monitor or PerformanceMonitor()
        self.out_dir = Path(config.out_dir)
        self.report: Dict = {"command": config.command, "version": __version__,
                             "branches": {}, "steps": {}}

    # Hilfen -----------------------------------------------------------------

    def path(self, key: str) -> Path:
        return self.out_dir / FILES[key]

    def _require(self, key: str) -> Path:
        path = self.path(key)
        if not path.exists():
            raise ConfigError(f"Eingabe fehlt: {path} (vorherigen Schritt zuerst ausführen)")
        return path

    def _trace(self, name: str) -> Optional[str]:
        return str(self.out_dir / f"trace_{name}.csv") if self.config.trace else None

    def _continue(self, name: str, orientation: Orientation, param_range: Interval,
                  seed: float, second_order: bool) -> CertifiedBranch:
        cfg = self.config
        policy = cfg.continuation_policy()
        problem = SwiftHohenbergProblem(orientation, cfg.integrator(self._trace(name)),
                                        second_order=second_order,
                                        intersect_direct=policy.intersect_direct)
        continuation = BranchContinuation(problem, policy, name, orientation)
        try:
            branch = continuation.run(param_range, seed)
        except CannotAdvance as exc:
            if exc.partial is not None:
                self._write_partial(exc.partial)
            raise
        finally:
            self.monitor.count("G_evaluations", problem.evaluations)
            self.report["branches"][name] = dict(continuation.statistics)
        self.monitor.record_branch(name, len(branch.segments))
        self.report["branches"][name].update({
            "segments": len(branch.segments),
            "indeterminate_segments": sum(
                1 for s in branch.segments if s.geometry is not None and not s.geometry.passed),
            "chain": branch.chain_report(),
        })
        return branch

    def _write_partial(self, branch: CertifiedBranch, extra: Optional[Dict] = None):
        """partial_<name>.json, nur mit --allow-partial"""
        if not self.config.allow_partial:
            return
        record = branch_to_record(branch, self.config.certificate_dict())
        record.update(extra or {})
        path = self.out_dir / f"partial_{branch.name}.json"
        write_certificate(path, record)
        self.logger.warning(f"Teilergebnis geschrieben: {path}")

    # Schritte ----------------------------------------------------------------

    def step1(self) -> Dict:
        """Äste x+ und x- mit Endpunkten bei xi_* und Trennung"""
        cfg = self.config
        self.monitor.begin_step("step1")
        lo, hi = cfg.branch_range()
        param_range = Interval(lo, hi)
        seeds = SeedGenerator.from_file(cfg.seed_file)

        branches = {}
        for which, name in (("upper", "x_plus"), ("lower", "x_minus")):
            seed = seeds.branch_seed(which, lo)
            self.logger.info(f"step1: {name} ab xi={lo!r}, Seed x={seed!r}")
            branches[which] = self._continue(name, Orientation.PARAM_IS_XI, param_range, seed, False)

        try:
            separation = verify_separation(branches["lower"], branches["upper"])
        except Indeterminate:
            for branch in branches.values():
                self._write_partial(branch)
            raise
        for which, branch in branches.items():
            write_certificate(self.path(which), branch_to_record(branch, cfg.certificate_dict()))
        x_plus, x_minus = branches["upper"].endpoints[1], branches["lower"].endpoints[1]
        report = {
            "xi_end": hi.hex(),
            "x_plus": _comparison(x_plus, REFERENCE["x_plus_end"]) if hi == XI_THRESHOLD else None,
            "x_minus": _comparison(x_minus, REFERENCE["x_minus_end"]) if hi == XI_THRESHOLD else None,
            "separated": bool(separation),
            "argument": separation.argument,
            "schema_version": "1.0",
            "config": cfg.certificate_dict(),
        }
        write_certificate(self.path("endpoints"), report)
        self.report["steps"]["step1"] = {"separated": True}
        self.logger.info(f"step1 abgeschlossen: x-={x_minus} < x+={x_plus}")
        return report

    def x_star_range(self) -> Interval:
        """X_* aus den gerichtet gerundeten Außenschranken der Endpunkte"""
        lower = load_branch(self._require("lower")).endpoints[1]
        upper = load_branch(self._require("upper")).endpoints[1]
        if lower is None or upper is None:
            raise ConfigError("Ast-Zertifikate ohne Endpunkte")
        return Interval(lower.lo, upper.hi)

    def step2(self) -> Dict:
        """xi~ über X_* mit zweiten Ableitungen und Konkavität"""
        cfg = self.config
        self.monitor.begin_step("step2")
        x_range = self.x_star_range()
        branch = self._continue("xi_tilde", Orientation.PARAM_IS_X, x_range, XI_THRESHOLD, True)
        concavity = certify_concavity(branch)
        record = branch_to_record(branch, cfg.certificate_dict())
        record["concavity"] = {
            "hull": concavity.hull.to_record(),
            "concave": concavity.concave,
            "comparison": _comparison(concavity.hull, REFERENCE["xi_tilde_second"]),
        }
        if not concavity.concave:
            self._write_partial(branch, {"concavity": record["concavity"]})
            raise Indeterminate(f"xi~'' nicht negativ eingeschlossen: {concavity.hull}")
        write_certificate(self.path("xi_tilde"), record)
        self.report["steps"]["step2"] = {"concavity_hull": str(concavity.hull)}
        self.logger.info(f"step2 abgeschlossen: xi~'' in {concavity.hull}")
        return record

    def step3(self) -> Dict:
        """Fold per 2D-Newton, verankert in der xi~-Kette"""
        cfg = self.config
        self.monitor.begin_step("step3")
        b_x = load_branch(self._require("xi_tilde"))
        seed = SeedGenerator.from_file(cfg.seed_file).fold_seed()
        integrator = cfg.integrator(self._trace("fold"))
        fc = locate_fold(seed, cfg.fold_radius, integrator)
        self.monitor.count("newton_calls")
        if not fc.proven:
            raise NewtonNotProven(f"Fold-Newton {fc.newton2d.status.value}: {fc.newton2d.reason}")
        fc = certify_unique_maximum(fc, b_x)

        if cfg.trace:
            point = eval_G(Interval(seed[0]), Interval(seed[1]), integrator)
            write_crossings_csv(point.crossings, self.out_dir / "crossings_fold.csv")

        record = fold_certificate_record(fc, cfg.certificate_dict())
        record["comparison"] = {
            "xi_star": _comparison(fc.xi_star, REFERENCE["xi_star"]),
            "x_star": _comparison(fc.x_star, REFERENCE["x_star"]),
            "alpha_star": _comparison(fc.alpha_star, REFERENCE["alpha_star"]),
            "xi_star_width_ok": fc.xi_star.diam <= FOLD_WIDTH_LIMIT,
        }
        write_certificate(self.path("fold"), record)
        self.report["steps"]["step3"] = {"xi_star": str(fc.xi_star), "alpha_star": str(fc.alpha_star)}
        self.logger.info(f"step3 abgeschlossen: xi*={fc.xi_star}, alpha*={fc.alpha_star}")
        return record

    def step4(self) -> Dict:
        """Trennung, Verklebung und Gesamtzertifikat"""
        cfg = self.config
        self.monitor.begin_step("step4")
        b_plus = load_branch(self._require("upper"))
        b_minus = load_branch(self._require("lower"))
        b_x = load_branch(self._require("xi_tilde"))
        fc = fold_from_record(read_certificate(self._require("fold")))

        separation = verify_separation(b_minus, b_plus)
        glue = glue_check(b_minus, b_plus, b_x, XI_THRESHOLD)
        master = assemble_theorem(fc, b_minus, b_plus, b_x, separation, glue,
                                  cfg.certificate_dict())
        master["alpha_check"] = xi_to_alpha(fc.xi_star).to_record()
        record = master_certificate_record(master, cfg.certificate_dict())
        write_certificate(self.path("master"), record)
        self.report["steps"]["step4"] = {"glue_witnesses": glue.witnesses}
        self.logger.info("step4 abgeschlossen: Gesamtzertifikat geschrieben")
        return record

    def run_all(self):
        for step in (self.step1, self.step2, self.step3, self.step4):
            step()

    def diagram(self) -> Path:
        """CSV aller vorhandenen Äste"""
        branches: List[CertifiedBranch] = []
        for key in ("upper", "lower", "xi_tilde"):
            path = self.path(key)
            if path.exists():
                branches.append(load_branch(path))
        if not branches:
            raise ConfigError(f"Keine Ast-Zertifikate in {self.out_dir}")
        return write_branch_csv(branches, self.path("diagram"))

    def selftest(self) -> Dict:
        self.monitor.begin_step("selftest")
        runner = SelfTestRunner(self.config.integrator())
        results = runner.run_all_tests()
        runner.save_report(self.path("selftest"))
        if results["overall_status"] != "PASSED":
            failed = [k for k, v in results["tests"].items() if v["status"] != "PASSED"]
            raise SelfTestFailed(f"Fehlgeschlagene Suiten: {', '.join(failed)}")
        return results

    def execute(self, command: str):
        handlers = {
            "step1": self.step1,
            "step2": self.step2,
            "step3": self.step3,
            "step4": self.step4,
            "all": self.run_all,
            "diagram": self.diagram,
            "selftest": self.selftest,
        }
        return handlers[command]()

    def write_run_report(self, status: str):
        self.monitor.stop()
        self.report["status"] = status
        self.monitor.write_report(self.path("run_report"), self.report)


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fold-prover",
        description="Computergestützter Beweis des Umkehrpunkts gerader periodischer Lösungen",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--taylor-order", dest="taylor_order", type=int)
    parser.add_argument("--tolerance", type=float)
    parser.add_argument("--min-step", dest="min_step", type=float)
    parser.add_argument("--max-step", dest="max_step", type=float)
    parser.add_argument("--representation", choices=("doubleton", "box"))
    parser.add_argument("--range", help="Parameterbereich lo:hi (hi 'xi*' = Schwellwert)")
    parser.add_argument("--threads", type=int)
    parser.add_argument("--wave-size", dest="wave_size", type=int)
    parser.add_argument("--out", dest="out_dir")
    parser.add_argument("--full-range", dest="full_range", action="store_true", default=None)
    parser.add_argument("--desk-scale", dest="desk_scale", action="store_true", default=None)
    parser.add_argument("--seed-file", dest="seed_file")
    parser.add_argument("--fold-radius", dest="fold_radius", type=float)
    parser.add_argument("--allow-partial", dest="allow_partial", action="store_true", default=None)
    parser.add_argument("--trace", action="store_true", default=None)
    parser.add_argument("--config-dir", dest="config_dir", default="config")
    parser.add_argument("--log-level", dest="log_level")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def _emit_error(exc: BaseException, code: int, command: str):
    payload = {"error": type(exc).__name__, "exit_code": code, "message": str(exc),
               "command": command}
    sys.stderr.write(json.dumps(payload, ensure_ascii=False) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    """Hauptfunktion; liefert den Exit-Code"""
    args = create_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config_dir")}

    pipeline = None
    try:
        manager = ConfigManager(args.config_dir)
        manager.load_config()
        config = manager.build_run_config(args.command, overrides)
        setup_logging(config.log_level, manager.prover_config["logging"].get("file"))

        monitor = PerformanceMonitor()
        monitor.start()
        pipeline = ProofPipeline(config, monitor)
        pipeline.execute(args.command)
        pipeline.write_run_report("ok")
        return EXIT_OK
    except Exception as exc:
        code = exit_code_for(exc)
        logging.getLogger(__name__).error(f"{args.command} abgebrochen: {type(exc).__name__}: {exc}")
        if pipeline is not None and args.command != "diagram":
            pipeline.write_run_report(type(exc).__name__)
        _emit_error(exc, code, args.command)
        return code


if __name__ == "__main__":
    sys.exit(main())
