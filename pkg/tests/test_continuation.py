#!/usr/bin/env python3
"""
Fold-Prover - Fortsetzung
Adaptive Segmentketten an geschlossenen Testmodellen, Trennung,
Konkavität und Verklebung
"""

import sys
import logging
import unittest
from pathlib import Path
from unittest import mock

# Projekt-Root zum Python-Pfad hinzufügen
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from dynamics.model import XI_THRESHOLD  # noqa: E402
from dynamics.odeint import IntegratorConfig  # noqa: E402
from numerics.interval import Interval  # noqa: E402
from proof.continuation import (  # noqa: E402
    BranchContinuation,
    BranchSegment,
    CannotAdvance,
    CertifiedBranch,
    ContinuationPolicy,
    Indeterminate,
    Orientation,
    SwiftHohenbergProblem,
    SyntheticProblem,
    certify_branch,
    certify_concavity,
    glue_check,
    verify_separation,
)
from proof.newton import NewtonOutcome, NewtonStatus  # noqa: E402
from prover.main import REFERENCE  # noqa: E402
from prover.seeds import DEFAULT_SEEDS, shoot  # noqa: E402


def square_root_problem() -> SyntheticProblem:
    """u^2 - p = 0, Äste u = +-sqrt(p)"""
    return SyntheticProblem(
        f=lambda p, u: u.sqr() - p,
        f_u=lambda p, u: 2.0 * u,
        f_p=lambda p, u: Interval(-1.0),
    )


def parabola_problem(c: float = 2.0, x_c: float = -1.55) -> SyntheticProblem:
    """u = c - (p - x_c)^2, also u'' = -2"""
    return SyntheticProblem(
        f=lambda p, u: u - c + (p - x_c).sqr(),
        f_u=lambda p, u: Interval(1.0),
        f_p=lambda p, u: 2.0 * (p - x_c),
        second=lambda p, u: (Interval(2.0), Interval(0.0), Interval(0.0)),
    )


def linear_problem(slope: float = 3.0) -> SyntheticProblem:
    """u = slope * p"""
    return SyntheticProblem(
        f=lambda p, u: u - slope * p,
        f_u=lambda p, u: Interval(1.0),
        f_p=lambda p, u: Interval(-slope),
    )


def make_policy(**overrides) -> ContinuationPolicy:
    settings = dict(initial_fraction=1.0 / 64.0, max_fraction=1.0 / 8.0,
                    initial_radius=1e-6, min_fraction=1e-9, wave_size=4)
    settings.update(overrides)
    return ContinuationPolicy(**settings)


def proven_segment(param: Interval, solution: Interval, refined: Interval) -> BranchSegment:
    return BranchSegment(param_box=param, solution_box=solution,
                         newton=NewtonOutcome(NewtonStatus.PROVEN, refined, solution, None))


class TestBranchContinuation(unittest.TestCase):
    """Überdeckung eines Parameterbereichs"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)

    def test_01_square_root_branch(self):
        """Test 1: u = sqrt(p) auf [1, 4]"""
        branch = certify_branch(Interval(1.0, 4.0), 1.0, Orientation.PARAM_IS_XI,
                                policy=make_policy(), problem=square_root_problem(),
                                name="sqrt")
        report = branch.chain_report()
        self.assertTrue(all(report.values()), report)
        self.assertTrue(branch.complete)
        self.assertEqual(branch.segments[0].param_box.lo, 1.0)
        self.assertEqual(branch.segments[-1].param_box.hi, 4.0)
        start, end = branch.endpoints
        self.assertTrue(start.contains(1.0))
        self.assertTrue(end.contains(2.0))
        self.assertLess(end.diam, 1e-6)
        branch.verify_chain()

    def test_02_implicit_slope_per_segment(self):
        """Test 2: u' = 1/(2u) ist in jedem Segment eingeschlossen"""
        branch = certify_branch(Interval(1.0, 2.0), 1.0, Orientation.PARAM_IS_XI,
                                policy=make_policy(), problem=square_root_problem())
        for seg in branch.segments:
            root = Interval(seg.param_box.mid).sqrt()
            self.assertTrue(seg.implicit_slope.intersects(0.5 / root))
            self.assertIn("f_u", seg.partials)

    def test_03_deterministic_across_threads(self):
        """Test 3: Gleiche Segmentgrenzen mit einem und mehreren Threads"""
        runs = []
        for threads in (1, 3):
            problem = square_root_problem()
            runs.append(certify_branch(Interval(1.0, 2.0), 1.0, Orientation.PARAM_IS_XI,
                                       policy=make_policy(threads=threads), problem=problem))
        self.assertEqual([s.param_box for s in runs[0].segments],
                         [s.param_box for s in runs[1].segments])
        self.assertEqual(runs[0].endpoints, runs[1].endpoints)

    def test_04_cannot_advance_keeps_partial(self):
        """Test 4: Dauerhaft defekte Segmente führen zu CannotAdvance"""
        problem = SyntheticProblem(
            f=lambda p, u: u - p,
            f_u=lambda p, u: Interval(-1.0, 1.0),
            f_p=lambda p, u: Interval(-1.0),
        )
        continuation = BranchContinuation(problem, make_policy(min_fraction=1e-3), name="broken")
        with self.assertRaises(CannotAdvance) as ctx:
            continuation.run(Interval(0.0, 1.0), 0.0)
        partial = ctx.exception.partial
        self.assertIsNotNone(partial)
        self.assertFalse(partial.complete)
        self.assertEqual(partial.segments, [])
        self.assertGreater(continuation.statistics["defect"], 0)

    def test_05_empty_range(self):
        """Test 5: Leerer Bereich"""
        continuation = BranchContinuation(square_root_problem(), make_policy())
        with self.assertRaises(ValueError):
            continuation.run(Interval(1.0), 1.0)

    def test_06_first_wave_follows_seed_slope(self):
        """Test 6: Steile Kurve ohne einen einzigen Fehlversuch"""
        continuation = BranchContinuation(linear_problem(), make_policy(initial_radius=1e-9),
                                          name="linear")
        branch = continuation.run(Interval(0.0, 1.0), 0.0)
        branch.verify_chain()
        self.assertEqual(continuation.statistics["inconclusive"], 0)
        self.assertEqual(continuation.statistics["defect"], 0)
        self.assertEqual(continuation.statistics["attempts"], len(branch.segments))
        self.assertTrue(branch.endpoints[1].contains(3.0))

    def test_07_width_grows_after_success(self):
        """Test 7: Nach vollständig angenommenen Wellen wächst die Breite"""
        branch = certify_branch(Interval(0.0, 1.0), 0.0, Orientation.PARAM_IS_XI,
                                policy=make_policy(initial_radius=1e-9),
                                problem=linear_problem())
        widest = max(s.param_box.diam for s in branch.segments)
        self.assertGreater(widest, 4.0 / 64.0)

    def test_08_explicit_seed_slope(self):
        """Test 8: Vorgegebene Steigung ersetzt die Auswertung am Seed"""
        problem = linear_problem()
        continuation = BranchContinuation(problem, make_policy(initial_radius=1e-9))
        with mock.patch.object(problem, "slope_at", wraps=problem.slope_at) as slope_at:
            continuation.run(Interval(0.0, 1.0), 0.0, seed_slope=3.0)
        slope_at.assert_not_called()

    def test_09_evaluation_counter_with_threads(self):
        """Test 9: Zähler stimmt bei parallelen Auswertungen"""
        problem = square_root_problem()
        continuation = BranchContinuation(problem, make_policy(threads=4))
        continuation.run(Interval(1.0, 4.0), 1.0)
        self.assertEqual(problem.evaluations, continuation.statistics["attempts"])


class TestBranchConsequences(unittest.TestCase):
    """Trennung, Konkavität und Verklebung"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)

    def test_01_separation_of_two_branches(self):
        """Test 1: -sqrt(p) < sqrt(p) am Endpunkt"""
        upper = certify_branch(Interval(1.0, 2.0), 1.0, Orientation.PARAM_IS_XI,
                               policy=make_policy(), problem=square_root_problem(), name="upper")
        lower = certify_branch(Interval(1.0, 2.0), -1.0, Orientation.PARAM_IS_XI,
                               policy=make_policy(), problem=square_root_problem(), name="lower")
        result = verify_separation(lower, upper)
        self.assertTrue(result)
        self.assertTrue(result.lower_end.contains(-Interval(2.0).sqrt()))
        self.assertTrue(result.upper_end.contains(Interval(2.0).sqrt()))
        self.assertEqual(len(result.argument), 4)

    def test_02_separation_needs_common_range(self):
        """Test 2: Verschiedene Bereiche sind nicht vergleichbar"""
        a = CertifiedBranch("a", Orientation.PARAM_IS_XI, Interval(1.0, 2.0), [],
                            (None, Interval(-1.0)))
        b = CertifiedBranch("b", Orientation.PARAM_IS_XI, Interval(1.0, 3.0), [],
                            (None, Interval(1.0)))
        with self.assertRaises(Indeterminate):
            verify_separation(a, b)
        c = CertifiedBranch("c", Orientation.PARAM_IS_XI, Interval(1.0, 2.0), [],
                            (None, Interval(-1.5, 0.5)))
        with self.assertRaises(Indeterminate):
            verify_separation(a, c)

    def test_03_parabola_is_concave(self):
        """Test 3: u'' = -2 in jedem Segment"""
        branch = certify_branch(Interval(-1.6, -1.5), 1.9975, Orientation.PARAM_IS_X,
                                policy=make_policy(), problem=parabola_problem())
        result = certify_concavity(branch)
        self.assertTrue(result)
        self.assertEqual(result.hull, Interval(-2.0))
        self.assertEqual(len(result.per_segment), len(branch.segments))
        self.assertIn("f_pp", branch.segments[0].partials)

    def test_04_concavity_requires_x_parametrization(self):
        """Test 4: Konkavität nur für die Parametrisierung über x"""
        branch = certify_branch(Interval(1.0, 2.0), 1.0, Orientation.PARAM_IS_XI,
                                policy=make_policy(), problem=square_root_problem())
        with self.assertRaises(Indeterminate):
            certify_concavity(branch)

    def test_05_glue_check(self):
        """Test 5: Endpunkte liegen in Segmentboxen der x-Parametrisierung"""
        xi_range = Interval(1.5, 2.0)
        lower = CertifiedBranch("x_minus", Orientation.PARAM_IS_XI, xi_range, [],
                                (None, Interval(-1.6001, -1.6)))
        upper = CertifiedBranch("x_plus", Orientation.PARAM_IS_XI, xi_range, [],
                                (None, Interval(-1.5, -1.4999)))
        b_x = CertifiedBranch("xi_tilde", Orientation.PARAM_IS_X, Interval(-1.61, -1.49), [
            proven_segment(Interval(-1.61, -1.55), Interval(1.99, 2.01), Interval(1.995, 2.005)),
            proven_segment(Interval(-1.55, -1.49), Interval(1.99, 2.01), Interval(1.995, 2.005)),
        ])
        glue = glue_check(lower, upper, b_x, 2.0)
        self.assertTrue(glue)
        self.assertEqual(glue.witnesses, {"lower": 0, "upper": 1})
        with self.assertRaises(Indeterminate):
            glue_check(lower, upper, b_x, 2.5)

    def test_06_broken_chain_is_reported(self):
        """Test 6: Lücke zwischen Segmenten"""
        branch = CertifiedBranch("gap", Orientation.PARAM_IS_XI, Interval(0.0, 1.0), [
            proven_segment(Interval(0.0, 0.5), Interval(0.9, 1.1), Interval(0.95, 1.05)),
            proven_segment(Interval(0.6, 1.0), Interval(0.9, 1.1), Interval(0.95, 1.05)),
        ])
        report = branch.chain_report()
        self.assertFalse(report["shared_endpoints"])
        self.assertTrue(report["all_proven"])
        with self.assertRaises(Indeterminate):
            branch.verify_chain()

    def test_07_incomplete_branch_is_not_separated(self):
        """Test 7: Trennung verlangt vollständige Äste mit gültiger Kette"""
        upper = certify_branch(Interval(1.0, 2.0), 1.0, Orientation.PARAM_IS_XI,
                               policy=make_policy(), problem=square_root_problem(), name="upper")
        lower = certify_branch(Interval(1.0, 2.0), -1.0, Orientation.PARAM_IS_XI,
                               policy=make_policy(), problem=square_root_problem(), name="lower")
        upper.complete = False
        with self.assertRaises(Indeterminate):
            verify_separation(lower, upper)
        upper.complete = True
        lower.segments = lower.segments[1:]
        with self.assertRaises(Indeterminate):
            verify_separation(lower, upper)


class TestSwiftHohenbergBranch(unittest.TestCase):
    """Kurzer Ast x+ direkt unterhalb von xi_*"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)
        self.seed = DEFAULT_SEEDS["branches"]["upper"]["x"]

    def test_01_short_branch_to_threshold(self):
        """Test 1: Endpunkt bei xi_* trifft die Referenz-Einschließung"""
        problem = SwiftHohenbergProblem(Orientation.PARAM_IS_XI, IntegratorConfig())
        policy = ContinuationPolicy(initial_fraction=0.5, max_fraction=1.0, wave_size=2,
                                    threads=2)
        continuation = BranchContinuation(problem, policy, name="x_plus")
        branch = continuation.run(Interval(XI_THRESHOLD - 1e-8, XI_THRESHOLD), self.seed)
        branch.verify_chain()
        self.assertTrue(branch.complete)
        self.assertTrue(all(s.geometry.passed for s in branch.segments))
        self.assertTrue(branch.endpoints[1].intersects(REFERENCE["x_plus_end"]))
        self.assertGreater(problem.evaluations, 0)

    def test_02_seed_slope_matches_shooting(self):
        """Test 2: u' am Seed aus G_x und G_xi"""
        problem = SwiftHohenbergProblem(Orientation.PARAM_IS_XI, IntegratorConfig())
        slope = problem.slope_at(XI_THRESHOLD, self.seed)
        shot = shoot(XI_THRESHOLD, self.seed)
        self.assertAlmostEqual(slope, -shot.d_dxi / shot.d_dx, delta=1e-4 * abs(slope))


if __name__ == "__main__":
    unittest.main()
