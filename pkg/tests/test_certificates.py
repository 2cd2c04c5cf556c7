#!/usr/bin/env python3
"""
Fold-Prover - Zertifikate
Kanonisches JSON, Konfigurations-Hash, Einlesen von Ast- und Fold-Zertifikaten
und Diagramm-CSV
"""

import sys
import csv
import json
import logging
import tempfile
import unittest
from pathlib import Path

# Projekt-Root zum Python-Pfad hinzufügen
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from numerics.interval import Interval, IntervalMatrix, IntervalVector  # noqa: E402
from proof.certificates import (  # noqa: E402
    SCHEMA_VERSION,
    CertificateFormatError,
    branch_from_record,
    branch_to_record,
    canonical_json,
    config_hash,
    fold_certificate_record,
    fold_from_record,
    load_branch,
    read_certificate,
    write_branch_csv,
    write_certificate,
)
from proof.continuation import (  # noqa: E402
    ContinuationPolicy,
    Orientation,
    SyntheticProblem,
    certify_branch,
)
from proof.fold import locate_fold  # noqa: E402

CONFIG = {"taylor_order": 20, "tolerance": (1e-14).hex(), "range": ["0x1.8p+0", "0x1.0p+1"]}


def sqrt_branch(name: str = "x_plus"):
    problem = SyntheticProblem(
        f=lambda p, u: u.sqr() - p,
        f_u=lambda p, u: 2.0 * u,
        f_p=lambda p, u: Interval(-1.0),
    )
    policy = ContinuationPolicy(initial_fraction=1.0 / 32.0, max_fraction=1.0 / 4.0,
                                initial_radius=1e-6, min_fraction=1e-9)
    return certify_branch(Interval(1.0, 2.0), 1.0, Orientation.PARAM_IS_XI,
                          policy=policy, problem=problem, name=name)


def fold_h(v: IntervalVector):
    xi, x = v[0], v[1]
    H = IntervalVector.of(xi - 2.0 + (x + 1.5).sqr(), 2.0 * (x + 1.5))
    DH = IntervalMatrix.from_intervals([[Interval(1.0), 2.0 * (x + 1.5)],
                                        [Interval(0.0), Interval(2.0)]])
    return H, DH


class TestCanonicalFormat(unittest.TestCase):
    """Deterministische Darstellung"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)

    def test_01_sorted_keys_and_trailing_newline(self):
        """Test 1: Schlüssel sortiert, Einrückung 2, Zeilenende"""
        text = canonical_json({"b": 1, "a": {"d": 2, "c": 3}})
        self.assertTrue(text.endswith("}\n"))
        self.assertLess(text.index('"a"'), text.index('"b"'))
        self.assertLess(text.index('"c"'), text.index('"d"'))
        self.assertIn('\n  "a"', text)

    def test_02_config_hash(self):
        """Test 2: Hash hängt nur vom Inhalt ab"""
        reordered = {"range": CONFIG["range"], "tolerance": CONFIG["tolerance"], "taylor_order": 20}
        self.assertEqual(config_hash(CONFIG), config_hash(reordered))
        self.assertEqual(len(config_hash(CONFIG)), 64)
        changed = dict(CONFIG, taylor_order=22)
        self.assertNotEqual(config_hash(CONFIG), config_hash(changed))

    def test_03_schema_version_is_checked(self):
        """Test 3: Fremdes Schema wird abgelehnt"""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "old.json"
            path.write_text(json.dumps({"schema_version": "0.1", "kind": "branch"}))
            with self.assertRaises(CertificateFormatError):
                read_certificate(path)

    def test_04_kind_is_checked(self):
        """Test 4: Fold-Datensatz ist kein Ast"""
        with self.assertRaises(CertificateFormatError):
            branch_from_record({"kind": "fold", "schema_version": SCHEMA_VERSION})


class TestBranchCertificates(unittest.TestCase):
    """Ast-Zertifikate schreiben und wieder einlesen"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)
        self.branch = sqrt_branch()

    def test_01_stamp_fields(self):
        """Test 1: Version, Konfiguration und Hash"""
        record = branch_to_record(self.branch, CONFIG)
        self.assertEqual(record["schema_version"], SCHEMA_VERSION)
        self.assertEqual(record["kind"], "branch")
        self.assertEqual(record["config_hash"], config_hash(CONFIG))
        self.assertEqual(record["segment_count"], len(self.branch.segments))
        self.assertTrue(all(record["chain"].values()))

    def test_02_read_back_is_exact(self):
        """Test 2: Segmentboxen und Endpunkte bit-exakt"""
        with tempfile.TemporaryDirectory() as tmp:
            path = write_certificate(Path(tmp) / "branch.json", branch_to_record(self.branch, CONFIG))
            loaded = load_branch(path)
        self.assertEqual(loaded.name, "x_plus")
        self.assertIs(loaded.orientation, Orientation.PARAM_IS_XI)
        self.assertEqual(loaded.endpoints, self.branch.endpoints)
        self.assertEqual([s.param_box for s in loaded.segments],
                         [s.param_box for s in self.branch.segments])
        self.assertEqual([s.refined for s in loaded.segments],
                         [s.refined for s in self.branch.segments])
        self.assertEqual(loaded.chain_report(), self.branch.chain_report())

    def test_03_identical_runs_give_identical_bytes(self):
        """Test 3: Gleiche Konfiguration ergibt gleiche Datei"""
        with tempfile.TemporaryDirectory() as tmp:
            first = write_certificate(Path(tmp) / "a.json", branch_to_record(self.branch, CONFIG))
            second = write_certificate(Path(tmp) / "b.json",
                                       branch_to_record(sqrt_branch(), CONFIG))
            self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_04_diagram_csv(self):
        """Test 4: Eine Zeile pro Segment und Ast"""
        lower = sqrt_branch("x_minus")
        with tempfile.TemporaryDirectory() as tmp:
            path = write_branch_csv([self.branch, lower], Path(tmp) / "diagram.csv")
            with open(path, newline="") as f:
                rows = list(csv.reader(f))
        self.assertEqual(rows[0], ["branch", "xi_mid", "x_mid", "xi_width", "x_width"])
        self.assertEqual(len(rows) - 1, len(self.branch.segments) + len(lower.segments))
        self.assertEqual(rows[1][0], "x_plus")
        self.assertGreaterEqual(float(rows[1][1]), 1.0)


class TestFoldCertificates(unittest.TestCase):
    """Fold-Zertifikat"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)

    def test_01_fold_read_back(self):
        """Test 1: Einschließungen und Seed überstehen JSON"""
        fc = locate_fold((2.0 + 1e-7, -1.5 - 2e-7), 1e-6, h_eval=fold_h)
        record = json.loads(canonical_json(fold_certificate_record(fc, CONFIG)))
        self.assertEqual(record["kind"], "fold")
        loaded = fold_from_record(record)
        self.assertEqual(loaded.xi_star, fc.xi_star)
        self.assertEqual(loaded.x_star, fc.x_star)
        self.assertEqual(loaded.alpha_star, fc.alpha_star)
        self.assertEqual(loaded.seed, fc.seed)
        self.assertEqual(loaded.radius, 1e-6)
        self.assertTrue(loaded.proven)
        self.assertEqual(loaded.newton2d.derivative_used.shape, (2, 2))


if __name__ == "__main__":
    unittest.main()
