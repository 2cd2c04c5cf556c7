#!/usr/bin/env python3
"""
Fold-Prover - Modell
Vektorfeld, Taylor-Koeffizienten, Energie, Symmetrie und alpha/xi-Umrechnung
"""

import sys
import logging
import unittest
from pathlib import Path

import numpy as np

# Projekt-Root zum Python-Pfad hinzufügen
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from dynamics.model import (  # noqa: E402
    XI_THRESHOLD,
    ExtendedState,
    ModelParams,
    SwiftHohenbergSystem,
    SystemState,
    alpha_to_xi,
    energy,
    extended_vector_field,
    hessian_terms,
    jacobian,
    reverse,
    reverse_vector,
    section_point,
    taylor_coefficients,
    vector_field,
    xi_to_alpha,
)
from numerics.interval import DomainError, Interval, IntervalVector  # noqa: E402


class TestVectorField(unittest.TestCase):
    """Vektorfeld und Taylor-Rekursion"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)
        self.state = SystemState(-1.5, 0.25, 0.75, -0.5)
        self.params = ModelParams(Interval(2.0))

    def test_01_vector_field_components(self):
        """Test 1: f = (y, z, w, x - xi z - x^3)"""
        f = vector_field(self.state, self.params)
        x = Interval(-1.5)
        expected = x - 2.0 * Interval(0.75) - x ** 3
        self.assertEqual(f[0], Interval(0.25))
        self.assertEqual(f[2], Interval(-0.5))
        self.assertTrue(f[3].contains(expected))

    def test_02_taylor_coefficients_match_derivatives(self):
        """Test 2: c1 = f(u0), c2 = Df(u0) f(u0) / 2"""
        coeffs = taylor_coefficients(self.state, self.params, 4)
        self.assertEqual(len(coeffs), 5)
        f = vector_field(self.state, self.params)
        for i in range(4):
            self.assertTrue(coeffs[1][i].intersects(f[i]))

        x, y, z, w = Interval(-1.5), Interval(0.25), Interval(0.75), Interval(-0.5)
        last = f[3]
        expected = [z / 2.0, w / 2.0, last / 2.0,
                    (y - 2.0 * w - 3.0 * x.sqr() * y) / 2.0]
        for i in range(4):
            self.assertTrue(coeffs[2][i].intersects(expected[i]))
            self.assertLess(coeffs[2][i].diam, 1e-12)

    def test_03_extended_system_keeps_parameter(self):
        """Test 3: Erweitertes System hat xi' = 0"""
        ext = ExtendedState(self.state, Interval(2.0))
        f = extended_vector_field(ext)
        self.assertEqual(f.shape, (5,))
        self.assertEqual(f[4], Interval(0.0))
        coeffs = taylor_coefficients(ext, None, 3)
        self.assertEqual(coeffs[0][4], Interval(2.0))
        self.assertEqual(coeffs[2][4], Interval(0.0))

    def test_04_jacobian_and_hessian(self):
        """Test 4: Jacobi-Matrix und einzige nichtlineare Zeile"""
        J = jacobian(self.state, self.params, extended=True)
        self.assertEqual(J.shape, (5, 5))
        self.assertTrue(J[3, 0].contains(1.0 - 3.0 * 2.25))
        self.assertEqual(J[3, 2], Interval(-2.0))
        self.assertEqual(J[3, 4], Interval(-0.75))
        terms = hessian_terms(self.state, self.params)
        e_x = IntervalVector([1.0, 0.0, 0.0, 0.0])
        self.assertEqual(terms.bilinear(e_x, e_x)[3], Interval(9.0))

    def test_05_linear_system_without_cubic_term(self):
        """Test 5: Linearer Teil für Vergleichsrechnungen"""
        system = SwiftHohenbergSystem(extended=False, xi=Interval(2.0), cubic=False)
        f = system.vector_field(self.state.as_vector())
        self.assertTrue(f[3].contains(-1.5 - 1.5))
        J = system.jacobian(self.state.as_vector())
        self.assertEqual(J[3, 0], Interval(1.0))


class TestInvariants(unittest.TestCase):
    """Energie, Reversibilität und Parameterbereich"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)

    def test_01_energy_vanishes_on_section(self):
        """Test 1: Schnittpunkte liegen im Niveau E = 0"""
        for x in (-1.62, -1.5824941113082425, -1.3):
            point = section_point(Interval(x))
            e = energy(point, ModelParams(Interval(XI_THRESHOLD)))
            self.assertTrue(e.contains_zero())
            self.assertLess(e.diam, 1e-14)

    def test_02_reverse_is_involution(self):
        """Test 2: R(R(s)) = s exakt"""
        s = SystemState(Interval(-1.6, -1.5), Interval(0.1, 0.2), 0.3, Interval(-0.4, 0.1))
        self.assertEqual(reverse(reverse(s)), s)
        v = IntervalVector.of(-1.5, 0.25, 0.75, -0.5, 2.0)
        back = reverse_vector(reverse_vector(v))
        np.testing.assert_array_equal(back.lo, v.lo)
        self.assertEqual(reverse_vector(v)[4], Interval(2.0))
        self.assertEqual(reverse_vector(v)[1], Interval(-0.25))

    def test_03_parameter_range(self):
        """Test 3: 0 <= xi <= sqrt(8)"""
        ModelParams(Interval(0.0, 2.8)).validate()
        with self.assertRaises(DomainError):
            ModelParams(Interval(2.8, 2.9)).validate()
        with self.assertRaises(DomainError):
            ModelParams(Interval(-0.1, 1.0)).validate()

    def test_04_threshold_is_exact(self):
        """Test 4: Schwellwert ist eine Maschinenzahl"""
        self.assertEqual(XI_THRESHOLD, 2.0316390991210938)
        self.assertEqual(XI_THRESHOLD * 2 ** 17, 266291.0)


class TestAlphaConversion(unittest.TestCase):
    """Umrechnung alpha = 1 + 4/xi^2"""

    def setUp(self):
        self.logger = logging.getLogger(__name__)

    def test_01_exact_points(self):
        """Test 1: xi = 2 entspricht alpha = 2"""
        self.assertTrue(xi_to_alpha(Interval(2.0)).contains(2.0))
        self.assertTrue(alpha_to_xi(Interval(2.0)).contains(2.0))

    def test_02_round_trip_encloses_start(self):
        """Test 2: alpha_to_xi(xi_to_alpha(xi)) enthält xi"""
        xi = Interval(2.0316516135613893, 2.0316516135814116)
        back = alpha_to_xi(xi_to_alpha(xi))
        self.assertTrue(back.contains(xi))
        self.assertLess(back.diam, 1e-10)

    def test_03_reference_fold_alpha(self):
        """Test 3: Fold-Parameter in alpha-Koordinaten"""
        alpha = xi_to_alpha(Interval(2.0316516135613893, 2.0316516135814116))
        self.assertTrue(alpha.intersects(Interval(1.9690842080101989, 1.9690842080293001)))

    def test_04_domain_errors(self):
        """Test 4: xi <= 0 und alpha <= 1 sind unzulässig"""
        with self.assertRaises(DomainError):
            xi_to_alpha(Interval(0.0, 1.0))
        with self.assertRaises(DomainError):
            alpha_to_xi(Interval(1.0, 2.0))


if __name__ == "__main__":
    unittest.main()
