#!/usr/bin/env python3
"""
Fold-Prover - Kommandozeile
Exit-Codes, Fehlerausgabe als JSON und Diagramm aus vorhandenen Zertifikaten
"""

import sys
import io
import json
import logging
import tempfile
import unittest
from contextlib import redirect_stderr
from pathlib import Path
from unittest import mock

import pytest
import yaml

# Projekt-Root zum Python-Pfad hinzufügen
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from dynamics.odeint import IntegrationError  # noqa: E402
from dynamics.poincare import GeometryIndeterminate, PoincareError  # noqa: E402
from numerics.interval import Interval  # noqa: E402
from proof.certificates import CertificateFormatError, branch_to_record, write_certificate  # noqa: E402
from proof.continuation import (  # noqa: E402
    CannotAdvance,
    CertifiedBranch,
    ContinuationPolicy,
    Indeterminate,
    Orientation,
    SyntheticProblem,
    certify_branch,
)
from proof.fold import CertificateRefused  # noqa: E402
from prover.config_manager import ConfigError  # noqa: E402
from prover.main import (  # noqa: E402
    FILES,
    NewtonNotProven,
    ProofPipeline,
    SelfTestFailed,
    create_parser,
    exit_code_for,
    main,
)
from prover.seeds import SeedError  # noqa: E402

SEED_FILE = project_root / "config" / "seeds.json"


def synthetic_branch(param_range: Interval, seed: float, orientation: Orientation, name: str,
                     problem: SyntheticProblem) -> CertifiedBranch:
    policy = ContinuationPolicy(initial_fraction=1.0 / 16.0, max_fraction=1.0 / 4.0,
                                initial_radius=1e-6, min_fraction=1e-9)
    return certify_branch(param_range, seed, orientation, policy=policy, problem=problem, name=name)


def square_root_problem() -> SyntheticProblem:
    """u^2 = p"""
    return SyntheticProblem(
        f=lambda p, u: u.sqr() - p,
        f_u=lambda p, u: 2.0 * u,
        f_p=lambda p, u: Interval(-1.0),
    )


def convex_problem() -> SyntheticProblem:
    """u = 1 + p^2, also u'' = 2"""
    return SyntheticProblem(
        f=lambda p, u: u - 1.0 - p.sqr(),
        f_u=lambda p, u: Interval(1.0),
        f_p=lambda p, u: -2.0 * p,
        second=lambda p, u: (Interval(-2.0), Interval(0.0), Interval(0.0)),
    )


def run_cli(argv, out: Path, config_dir: Path):
    """main() mit umgeleitetem stderr; liefert (Code, nichtleere stderr-Zeilen)"""
    stderr = io.StringIO()
    with redirect_stderr(stderr):
        code = main([*argv, "--out", str(out), "--config-dir", str(config_dir)])
    return code, [line for line in stderr.getvalue().splitlines() if line.strip()]


def prepare_workspace(test: unittest.TestCase) -> None:
    test.tmp = tempfile.TemporaryDirectory()
    root = Path(test.tmp.name)
    test.out = root / "out"
    test.config_dir = root / "config"
    test.config_dir.mkdir()
    with open(test.config_dir / "prover_config.yaml", "w", encoding="utf-8") as f:
        yaml.dump({"logging": {"level": "WARNING", "file": str(root / "logs" / "prover.log")}}, f)


def release_workspace(test: unittest.TestCase) -> None:
    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        handler.close()
        root_logger.removeHandler(handler)
    test.tmp.cleanup()


class TestExitCodes(unittest.TestCase):
    """Zuordnung Fehlerklasse -> Exit-Code"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)

    def test_01_mapping(self):
        """Test 1: Jede Fehlerklasse hat ihren Code"""
        cases = [
            (ConfigError("x"), 2),
            (CertificateFormatError("x"), 2),
            (IntegrationError("x"), 3),
            (PoincareError("x"), 3),
            (SeedError("x"), 3),
            (NewtonNotProven("x"), 4),
            (CannotAdvance("x"), 4),
            (Indeterminate("x"), 5),
            (GeometryIndeterminate("x"), 5),
            (CertificateRefused("x"), 5),
            (SelfTestFailed("x"), 1),
            (RuntimeError("x"), 1),
        ]
        for exc, code in cases:
            self.assertEqual(exit_code_for(exc), code, type(exc).__name__)

    def test_02_parser(self):
        """Test 2: Unbekanntes Kommando wird abgewiesen"""
        parser = create_parser()
        self.assertEqual(parser.parse_args(["step1", "--threads", "2"]).threads, 2)
        self.assertIsNone(parser.parse_args(["all"]).full_range)
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit):
                parser.parse_args(["plot"])


class TestMain(unittest.TestCase):
    """main() in einem temporären Arbeitsbereich"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)
        prepare_workspace(self)

    def tearDown(self):
        release_workspace(self)

    def run_main(self, *argv):
        return run_cli(argv, self.out, self.config_dir)

    def test_01_diagram_without_certificates(self):
        """Test 1: Diagramm ohne Eingaben -> Exit 2, keine Dateien"""
        code, lines = self.run_main("diagram")
        self.assertEqual(code, 2)
        error = json.loads(lines[-1])
        self.assertEqual(error["error"], "ConfigError")
        self.assertEqual(error["exit_code"], 2)
        self.assertEqual(error["command"], "diagram")
        self.assertFalse(self.out.exists())

    def test_02_invalid_taylor_order(self):
        """Test 2: --taylor-order 2 ist ein Konfigurationsfehler"""
        code, lines = self.run_main("step1", "--taylor-order", "2")
        self.assertEqual(code, 2)
        self.assertIn("taylor_order", json.loads(lines[-1])["message"])
        self.assertFalse(self.out.exists())

    def test_03_step4_needs_previous_steps(self):
        """Test 3: Fehlende Zertifikate -> Exit 2 mit Laufbericht"""
        code, lines = self.run_main("step4")
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(lines[-1])["command"], "step4")
        report = json.loads((self.out / FILES["run_report"]).read_text(encoding="utf-8"))
        self.assertEqual(report["status"], "ConfigError")

    def test_04_diagram_from_existing_branch(self):
        """Test 4: Diagramm aus einem vorhandenen Ast"""
        branch = synthetic_branch(Interval(1.0, 2.0), 1.0, Orientation.PARAM_IS_XI, "x_plus",
                                  square_root_problem())
        write_certificate(self.out / FILES["upper"], branch_to_record(branch, {}))

        code, _ = self.run_main("diagram")
        self.assertEqual(code, 0)
        rows = (self.out / FILES["diagram"]).read_text(encoding="utf-8").splitlines()
        self.assertEqual(len(rows), len(branch.segments) + 1)


class TestFailedChecks(unittest.TestCase):
    """Fehlgeschlagene Prüfungen hinterlassen keine Zertifikate"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)
        prepare_workspace(self)

    def tearDown(self):
        release_workspace(self)

    def run_step1_with_touching_branches(self, *extra):
        def touching(name, orientation, param_range, seed, second_order):
            return synthetic_branch(param_range, 1.0, orientation, name, square_root_problem())

        with mock.patch.object(ProofPipeline, "_continue", side_effect=touching), \
                mock.patch("prover.main.SeedGenerator"):
            return run_cli(["step1", "--range", "1.0:2.0", *extra], self.out, self.config_dir)

    def test_01_step1_without_separation(self):
        """Test 1: Gleiche Endpunkte -> Exit 5, keine Ast-Zertifikate"""
        code, lines = self.run_step1_with_touching_branches()
        self.assertEqual(code, 5)
        self.assertEqual(json.loads(lines[-1])["error"], "Indeterminate")
        for key in ("upper", "lower", "endpoints"):
            self.assertFalse((self.out / FILES[key]).exists(), key)
        self.assertFalse((self.out / "partial_x_plus.json").exists())

    def test_02_step1_allow_partial(self):
        """Test 2: Mit --allow-partial landen die Äste in partial_*.json"""
        code, _ = self.run_step1_with_touching_branches("--allow-partial")
        self.assertEqual(code, 5)
        self.assertTrue((self.out / "partial_x_plus.json").exists())
        self.assertTrue((self.out / "partial_x_minus.json").exists())
        self.assertFalse((self.out / FILES["upper"]).exists())

    def test_03_step2_without_concavity(self):
        """Test 3: Konvexe Kurve xi~ -> Exit 5, kein branch_xi_tilde.json"""
        param_range = Interval(1.0, 2.0)
        for key, name, seed in (("upper", "x_plus", 1.0), ("lower", "x_minus", -1.0)):
            branch = synthetic_branch(param_range, seed, Orientation.PARAM_IS_XI, name,
                                      square_root_problem())
            write_certificate(self.out / FILES[key], branch_to_record(branch, {}))

        def convex(name, orientation, x_range, seed, second_order):
            return synthetic_branch(x_range, 1.0 + x_range.lo ** 2, orientation, name,
                                    convex_problem())

        with mock.patch.object(ProofPipeline, "_continue", side_effect=convex):
            code, lines = run_cli(["step2", "--range", "1.0:2.0"], self.out, self.config_dir)
        self.assertEqual(code, 5)
        self.assertIn("xi~", json.loads(lines[-1])["message"])
        self.assertFalse((self.out / FILES["xi_tilde"]).exists())
        report = json.loads((self.out / FILES["run_report"]).read_text(encoding="utf-8"))
        self.assertEqual(report["status"], "Indeterminate")


@pytest.mark.slow
class TestDeskScaleProof(unittest.TestCase):
    """Beweiskette auf einem kurzen Bereich unterhalb von xi_*"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)
        prepare_workspace(self)

    def tearDown(self):
        release_workspace(self)

    def read(self, key: str) -> dict:
        return json.loads((self.out / FILES[key]).read_text(encoding="utf-8"))

    def test_01_all_steps(self):
        """Test 1: step1 bis step4 reproduzieren die Referenz-Einschließungen"""
        common = ["--range", "2.03:xi*", "--threads", "2", "--seed-file", str(SEED_FILE)]
        for step in ("step1", "step2", "step3", "step4"):
            code, lines = run_cli([step, *common], self.out, self.config_dir)
            self.assertEqual(code, 0, lines[-1:] if lines else step)

        endpoints = self.read("endpoints")
        self.assertTrue(endpoints["separated"])
        self.assertTrue(endpoints["x_plus"]["intersects"])
        self.assertTrue(endpoints["x_minus"]["intersects"])

        concavity = self.read("xi_tilde")["concavity"]
        self.assertTrue(concavity["concave"])
        self.assertTrue(concavity["comparison"]["intersects"])

        fold = self.read("fold")
        self.assertEqual(fold["newton2d"]["status"], "Proven")
        self.assertTrue(fold["comparison"]["xi_star"]["intersects"])
        self.assertTrue(fold["comparison"]["alpha_star"]["intersects"])

        master = self.read("master")
        self.assertEqual(master["kind"], "master")
        self.assertEqual(len(master["claims"]), 6)

        code, _ = run_cli(["diagram"], self.out, self.config_dir)
        self.assertEqual(code, 0)
        self.assertTrue((self.out / FILES["diagram"]).exists())


@pytest.mark.slow
class TestBranchRangeProof(unittest.TestCase):
    """Äste x+ und x- auf [1.9, xi_*]"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)
        prepare_workspace(self)

    def tearDown(self):
        release_workspace(self)

    def test_01_step1_endpoints(self):
        """Test 1: Endpunkte bei xi_* treffen die Referenz-Einschließungen"""
        code, lines = run_cli(["step1", "--range", "1.9:xi*", "--threads", "4",
                               "--seed-file", str(SEED_FILE)], self.out, self.config_dir)
        self.assertEqual(code, 0, lines[-1:])
        endpoints = json.loads((self.out / FILES["endpoints"]).read_text(encoding="utf-8"))
        self.assertTrue(endpoints["separated"])
        self.assertTrue(endpoints["x_plus"]["intersects"])
        self.assertTrue(endpoints["x_minus"]["intersects"])
        for key in ("upper", "lower"):
            branch = json.loads((self.out / FILES[key]).read_text(encoding="utf-8"))
            self.assertTrue(branch["complete"])
            self.assertTrue(all(branch["chain"].values()), branch["chain"])


if __name__ == "__main__":
    unittest.main()
