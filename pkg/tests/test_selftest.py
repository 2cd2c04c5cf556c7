#!/usr/bin/env python3
"""
Fold-Prover - Selbsttest-Suiten
Kleine Stichprobenzahlen; der volle Lauf ist als slow markiert
"""

import sys
import json
import logging
import tempfile
import unittest
from pathlib import Path

import pytest

# Projekt-Root zum Python-Pfad hinzufügen
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from dynamics.odeint import IntegratorConfig  # noqa: E402
from prover.selftest import SelfTestRunner  # noqa: E402


class TestSelfTestRunner(unittest.TestCase):
    """Eigenschafts-Suiten ohne pytest-Abhängigkeit"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)
        self.runner = SelfTestRunner(IntegratorConfig(taylor_order=16), fuzz_samples=5000,
                                     derivative_points=2, reversibility_states=2)

    def test_01_interval_fuzzing(self):
        """Test 1: Keine Verletzung der Einschließung"""
        self.runner.test_interval_containment(batch=1000)
        result = self.runner.results["tests"]["interval_containment"]
        self.assertEqual(result["status"], "PASSED", result["violations"])
        self.assertEqual(result["samples"], 5000)
        self.assertEqual(result["exact_checked"], 1000)

    def test_02_newton_suite_and_report(self):
        """Test 2: Newton-Suite und Bericht"""
        self.runner.test_newton()
        self.runner.determine_overall_status()
        self.assertEqual(self.runner.results["overall_status"], "PASSED")
        with tempfile.TemporaryDirectory() as tmp:
            path = self.runner.save_report(Path(tmp) / "selftest_report.json")
            report = json.loads(path.read_text(encoding="utf-8"))
        self.assertEqual(report["tests"]["newton"]["synthetic_fold"], "Proven")
        self.assertEqual(report["total_tests"], 1)

    def test_03_failed_suite_fails_overall(self):
        """Test 3: Eine fehlgeschlagene Suite bestimmt den Gesamtstatus"""
        self.runner.test_newton()
        self.runner.results["tests"]["dummy"] = {"status": "FAILED"}
        self.runner.determine_overall_status()
        self.assertEqual(self.runner.results["overall_status"], "FAILED")
        self.assertEqual(self.runner.results["passed_tests"], 1)

    @pytest.mark.slow
    def test_04_all_suites(self):
        """Test 4: Alle Suiten mit wenigen Punkten"""
        results = self.runner.run_all_tests()
        failed = {k: v for k, v in results["tests"].items() if v["status"] != "PASSED"}
        self.assertEqual(failed, {})
        self.assertEqual(results["total_tests"], 5)


if __name__ == "__main__":
    unittest.main()
