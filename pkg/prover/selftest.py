#!/usr/bin/env python3
"""
Selbsttest - Eigenschaftsprüfungen des Beweiswerkzeugs ohne pytest
Intervall-Fuzzing, Energie-Erhaltung, Ableitungen der Poincaré-Abbildung
gegen Differenzenquotienten, Reversibilität und Intervall-Newton.
"""

import json
import logging
import math
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
from scipy.integrate import solve_ivp

from dynamics.model import (
    ModelParams,
    SystemState,
    energy_of_vector,
    reverse_vector,
    section_z,
)
from dynamics.odeint import IntegratorConfig, energy_along, flow
from dynamics.poincare import eval_G
from numerics.interval import Interval, IntervalArray, IntervalMatrix, IntervalVector
from proof.newton import newton_2d, newton_scalar
from prover.seeds import shoot

FUZZ_SAMPLES = 1_000_000
DERIVATIVE_POINTS = 20
REVERSIBILITY_STATES = 20
ENERGY_DRIFT_LIMIT = 1e-8
FIRST_DERIVATIVE_TOL = 1e-4
SECOND_DERIVATIVE_TOL = 1e-3
FD_STEP = 1e-5


class SelfTestRunner:
    """Führt die Eigenschafts-Suiten aus und sammelt die Ergebnisse"""

    def __init__(self, integrator: Optional[IntegratorConfig] = None, seed: int = 20240611,
                 fuzz_samples: int = FUZZ_SAMPLES, derivative_points: int = DERIVATIVE_POINTS,
                 reversibility_states: int = REVERSIBILITY_STATES):
        self.logger = logging.getLogger(__name__)
        self.integrator = integrator or IntegratorConfig()
        self.rng = np.random.default_rng(seed)
        self.fuzz_samples = fuzz_samples
        self.derivative_points = derivative_points
        self.reversibility_states = reversibility_states
        self.results: Dict[str, Any] = {
            "timestamp": time.time(),
            "tests": {},
            "overall_status": "unknown",
        }

    def run_all_tests(self) -> Dict[str, Any]:
        """Alle Suiten ausführen"""
        self.logger.info("Starte Selbsttest")
        self.test_interval_containment()
        self.test_energy()
        self.test_poincare_derivatives()
        self.test_reversibility()
        self.test_newton()
        self.determine_overall_status()
        return self.results

    def _record(self, name: str, passed: bool, started: float, **details):
        self.results["tests"][name] = {
            "status": "PASSED" if passed else "FAILED",
            "seconds": round(time.time() - started, 3),
            **details,
        }
        if passed:
            self.logger.info(f"{name}: bestanden")
        else:
            self.logger.error(f"{name}: fehlgeschlagen {details}")

    # Suite 1 ----------------------------------------------------------------

    def _random_intervals(self, n: int, scale: float = 1e3) -> IntervalArray:
        centers = self.rng.uniform(-scale, scale, n) * 10.0 ** self.rng.integers(-8, 3, n)
        radii = np.abs(centers) * 10.0 ** self.rng.uniform(-16, -1, n)
        radii[self.rng.random(n) < 0.1] = 0.0
        return IntervalArray(centers - radii, centers + radii)

    def _sample(self, a: IntervalArray) -> np.ndarray:
        u = self.rng.random(a.lo.shape)
        return np.clip(a.lo + u * (a.hi - a.lo), a.lo, a.hi)

    def test_interval_containment(self, batch: int = 100_000):
        """Test 1: Eingeschlossenheit der Grundoperationen an Stichproben"""
        self.logger.info("Test 1: Intervall-Fuzzing")
        started = time.time()
        violations = {"add": 0, "sub": 0, "mul": 0, "div": 0, "sqr": 0, "sqrt": 0}
        exact_checked = 0
        done = 0
        while done < self.fuzz_samples:
            n = min(batch, self.fuzz_samples - done)
            a, b = self._random_intervals(n), self._random_intervals(n)
            x, y = self._sample(a), self._sample(b)
            checks = {
                "add": (a + b, x + y),
                "sub": (a - b, x - y),
                "mul": (a * b, x * y),
                "sqr": (a.sqr(), x * x),
            }
            nonzero = ~b.contains_zero()
            if np.any(nonzero):
                bn = IntervalArray(b.lo[nonzero], b.hi[nonzero])
                an = IntervalArray(a.lo[nonzero], a.hi[nonzero])
                checks["div"] = (an / bn, x[nonzero] / y[nonzero])
            positive = a.lo >= 0.0
            if np.any(positive):
                ap = IntervalArray(a.lo[positive], a.hi[positive])
                checks["sqrt"] = (ap.sqrt(), np.sqrt(x[positive]))
            for op, (enclosure, value) in checks.items():
                violations[op] += int(np.count_nonzero((value < enclosure.lo) | (value > enclosure.hi)))

            # exakte Stichprobe mit Brüchen
            for i in range(min(200, n)):
                exact = Fraction(float(x[i])) * Fraction(float(y[i]))
                product = Interval(a.lo[i], a.hi[i]) * Interval(b.lo[i], b.hi[i])
                if not Fraction(product.lo) <= exact <= Fraction(product.hi):
                    violations["mul"] += 1
                exact_checked += 1
            done += n
        self._record("interval_containment", sum(violations.values()) == 0, started,
                     samples=done, exact_checked=exact_checked, violations=violations)

    # Suite 2 ----------------------------------------------------------------

    @staticmethod
    def _energy(state: np.ndarray, xi: float) -> float:
        x, y, z, w = state
        return w * y - 0.5 * z * z + 0.5 * xi * y * y + 0.25 * (x * x - 1.0) ** 2

    def test_energy(self, xi: float = 2.0, xs=(-1.62, -1.6, -1.58, -1.56, -1.54)):
        """Test 2: Energie als erstes Integral"""
        self.logger.info("Test 2: Energie-Erhaltung")
        started = time.time()
        max_drift = 0.0
        for x in xs:
            start = np.array([x, 0.0, (x * x - 1.0) / math.sqrt(2.0), 0.0])
            period = 2.0 * shoot(xi, x).times[-1]

            def rhs(t, u):
                return [u[1], u[2], u[3], u[0] - xi * u[2] - u[0] ** 3]

            sol = solve_ivp(rhs, (0.0, period), start, method="DOP853", rtol=1e-12, atol=1e-13,
                            t_eval=np.linspace(0.0, period, 200))
            e0 = self._energy(start, xi)
            drift = max(abs(self._energy(sol.y[:, k], xi) - e0) for k in range(sol.y.shape[1]))
            max_drift = max(max_drift, drift)

        x0 = Interval(-1.58)
        state = SystemState(x0, 0.0, section_z(x0), 0.0)
        chain = flow(state, ModelParams(Interval(xi)), 1.0, self.integrator)
        energies = [energy_of_vector(state.as_vector(), Interval(xi))] + energy_along(chain, Interval(xi))
        rigorous_ok = all(e.contains_zero() for e in energies)
        self._record("energy", max_drift <= ENERGY_DRIFT_LIMIT and rigorous_ok, started,
                     max_drift=max_drift, rigorous_steps=len(chain),
                     rigorous_max_width=max(e.diam for e in energies))

    # Suite 3 ----------------------------------------------------------------

    def test_poincare_derivatives(self):
        """Test 3: DP und D2P gegen Differenzenquotienten"""
        self.logger.info("Test 3: Ableitungen der Poincaré-Abbildung")
        started = time.time()
        xis = np.linspace(1.9, 2.03, self.derivative_points)
        xs = np.linspace(-1.60, -1.56, self.derivative_points)
        worst_first, worst_second = 0.0, 0.0
        h = FD_STEP
        for xi, x in zip(xis, xs):
            xi, x = float(xi), float(x)
            g = eval_G(Interval(xi), Interval(x), self.integrator, order=2)
            ref = shoot(xi, x)
            for rigorous, value in ((g.d_dx, ref.d_dx), (g.d_dxi, ref.d_dxi)):
                worst_first = max(worst_first, abs(rigorous.mid - value) / max(abs(value), 1.0))
            gxx = (shoot(xi, x + h).d_dx - shoot(xi, x - h).d_dx) / (2.0 * h)
            gxxi = (shoot(xi + h, x).d_dx - shoot(xi - h, x).d_dx) / (2.0 * h)
            gxixi = (shoot(xi + h, x).d_dxi - shoot(xi - h, x).d_dxi) / (2.0 * h)
            for rigorous, value in ((g.d2_dx2, gxx), (g.d2_dxdxi, gxxi), (g.d2_dxi2, gxixi)):
                worst_second = max(worst_second, abs(rigorous.mid - value) / max(abs(value), 1.0))
        passed = worst_first <= FIRST_DERIVATIVE_TOL and worst_second <= SECOND_DERIVATIVE_TOL
        self._record("poincare_derivatives", passed, started, points=len(xis),
                     worst_first=worst_first, worst_second=worst_second)

    # Suite 4 ----------------------------------------------------------------

    def test_reversibility(self, t: float = 0.5, xi: float = 2.0):
        """Test 4: s liegt in R(phi_t(R(phi_t(s))))"""
        self.logger.info("Test 4: Reversibilität")
        started = time.time()
        params = ModelParams(Interval(xi))
        failures = 0
        widths = []
        for _ in range(self.reversibility_states):
            x = float(self.rng.uniform(-1.6, -1.5))
            s = np.array([x, self.rng.uniform(-0.1, 0.1),
                          (x * x - 1.0) / math.sqrt(2.0) + self.rng.uniform(-0.1, 0.1),
                          self.rng.uniform(-0.1, 0.1)])
            u = IntervalVector(s)
            forward = flow(u, params, t, self.integrator)[-1].end
            back = flow(reverse_vector(forward), params, t, self.integrator)[-1].end
            result = reverse_vector(back)
            widths.append(result.max_diam())
            if not result.contains(u):
                failures += 1
        self._record("reversibility", failures == 0, started,
                     states=self.reversibility_states, failures=failures,
                     max_width=max(widths) if widths else 0.0)

    # Suite 5 ----------------------------------------------------------------

    def test_newton(self):
        """Test 5: Intervall-Newton an geschlossenen Lösungen"""
        self.logger.info("Test 5: Intervall-Newton")
        started = time.time()
        sqrt2 = newton_scalar(lambda x: (x.sqr() - 2.0, 2.0 * x), Interval(1.0, 2.0), 1.5)
        sqrt2_ok = sqrt2.proven and sqrt2.refined.contains(Interval(2.0).sqrt())

        xi_c, x_c = 2.0, -1.5

        def h_eval(v: IntervalVector):
            xi, x = v[0], v[1]
            H = IntervalVector.of(xi - xi_c + (x - x_c).sqr(), 2.0 * (x - x_c))
            DH = IntervalMatrix.from_intervals([[Interval(1.0), 2.0 * (x - x_c)],
                                                [Interval(0.0), Interval(2.0)]])
            return H, DH

        box = IntervalVector([xi_c + 1e-3, x_c - 2e-3]).inflate(absolute=1e-2)
        fold = newton_2d(h_eval, box)
        fold_ok = fold.proven and fold.refined.contains(IntervalVector([xi_c, x_c]))
        self._record("newton", sqrt2_ok and fold_ok, started,
                     sqrt2=sqrt2.status.value, synthetic_fold=fold.status.value)

    # ------------------------------------------------------------------------

    def determine_overall_status(self):
        """Gesamtstatus bestimmen"""
        tests = self.results["tests"]
        passed = sum(1 for r in tests.values() if r["status"] == "PASSED")
        self.results["passed_tests"] = passed
        self.results["total_tests"] = len(tests)
        self.results["overall_status"] = "PASSED" if passed == len(tests) else "FAILED"

    def save_report(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.results, f, indent=2, ensure_ascii=False)
        self.logger.info(f"Selbsttest-Bericht gespeichert: {path}")
        return path
