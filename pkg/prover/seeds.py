#!/usr/bin/env python3
"""
Seeds - nichtrigorose Startwerte für Fortsetzung und Fold
Schießverfahren mit scipy (solve_ivp mit Ereignissuche auf y=0) samt erster
Variationsgleichung, Nullstellensuche mit fsolve und natürliche
Parameterfortsetzung der Äste von xi_* abwärts.
Nichts aus diesem Modul geht ungeprüft in einen Beweis ein.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import fsolve

from dynamics.model import XI_THRESHOLD
from numerics.interval import ProverError

RTOL = 1e-12
ATOL = 1e-13
T_MAX = 60.0
SECTION_EPS = 1e-9
RESIDUAL_LIMIT = 1e-10

DEFAULT_SEEDS = {
    "fold": {"xi": 2.0316516135713902, "x": -1.5824941113082425},
    "xi_threshold": XI_THRESHOLD,
    "branches": {
        "upper": {"xi": XI_THRESHOLD, "x": -1.5824440318309407},
        "lower": {"xi": XI_THRESHOLD, "x": -1.5825350627546677},
    },
}


class SeedError(ProverError):
    """Nichtrigorose Startwertsuche gescheitert"""


@dataclass
class ShotResult:
    value: float
    d_dx: float
    d_dxi: float
    times: List[float]
    states: List[np.ndarray]


def _rhs(t, state, xi):
    """Fluss samt Variationen nach x (Spalte 0) und xi (Spalte 1)"""
    x, y, z, w = state[:4]
    V = state[4:].reshape(4, 2)
    f = np.array([y, z, w, x - xi * z - x ** 3])
    J = np.array([
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0 - 3.0 * x * x, 0.0, -xi, 0.0],
    ])
    dV = J @ V
    dV[3, 1] -= z
    return np.concatenate([f, dV.ravel()])


def _section(t, state, xi):
    return state[1]


def _initial(x: float) -> np.ndarray:
    z = (x * x - 1.0) / math.sqrt(2.0)
    V0 = np.zeros((4, 2))
    V0[0, 0] = 1.0
    V0[2, 0] = math.sqrt(2.0) * x
    return np.concatenate([[x, 0.0, z, 0.0], V0.ravel()])


def shoot(xi: float, x: float, crossings: int = 2) -> ShotResult:
    """Nichtrigoroses G(xi, x) mit G_x und G_xi über die Variationsgleichung"""
    sol = solve_ivp(_rhs, (0.0, T_MAX), _initial(x), method="DOP853", args=(xi,),
                    events=_section, rtol=RTOL, atol=ATOL)
    times = [t for t in sol.t_events[0] if t > SECTION_EPS]
    states = [s for t, s in zip(sol.t_events[0], sol.y_events[0]) if t > SECTION_EPS]
    if len(states) < crossings:
        raise SeedError(f"Nur {len(states)} Schnitte bis t={T_MAX} bei xi={xi!r}, x={x!r}")
    end = states[crossings - 1]
    state, V = end[:4], end[4:].reshape(4, 2)
    f = _rhs(0.0, end, xi)[:4]
    if f[1] == 0.0:
        raise SeedError("Tangentialer Schnitt")
    dtau = -V[1] / f[1]
    DP = V + np.outer(f, dtau)
    return ShotResult(value=float(state[3]), d_dx=float(DP[3, 0]), d_dxi=float(DP[3, 1]),
                      times=times[:crossings], states=[s[:4] for s in states[:crossings]])


def G(xi: float, x: float) -> float:
    return shoot(xi, x).value


class SeedGenerator:
    """Startwerte für Äste und Fold aus einer Seed-Datei oder den eingebauten Werten"""

    def __init__(self, seeds: Optional[Dict] = None, step: float = 0.01):
        self.logger = logging.getLogger(__name__)
        self.seeds = seeds or DEFAULT_SEEDS
        self.step = step

    @classmethod
    def from_file(cls, path: Union[str, Path, None]) -> "SeedGenerator":
        if path is None or not Path(path).exists():
            logging.getLogger(__name__).warning(f"Seed-Datei {path} fehlt, verwende eingebaute Werte")
            return cls()
        with open(path, "r", encoding="utf-8") as f:
            return cls(json.load(f))

    def fold_seed(self) -> Tuple[float, float]:
        fold = self.seeds["fold"]
        return float(fold["xi"]), float(fold["x"])

    def branch_start(self, which: str) -> Tuple[float, float]:
        point = self.seeds["branches"][which]
        return float(point["xi"]), float(point["x"])

    def solve_x(self, xi: float, guess: float) -> float:
        """x mit G(xi, x) = 0 nahe guess"""
        def residual(v):
            return [G(xi, float(v[0]))]

        def jac(v):
            return [[shoot(xi, float(v[0])).d_dx]]

        root, info, ier, msg = fsolve(residual, [guess], fprime=jac, full_output=True, xtol=1e-14)
        if ier != 1 and abs(info["fvec"][0]) > RESIDUAL_LIMIT:
            raise SeedError(f"fsolve bei xi={xi!r}: {msg}")
        return float(root[0])

    def branch_seed(self, which: str, xi_target: float) -> float:
        """x_which(xi_target) per Fortsetzung vom gespeicherten Punkt aus"""
        xi, x = self.branch_start(which)
        if xi_target == xi:
            return x
        direction = 1.0 if xi_target > xi else -1.0
        history: List[Tuple[float, float]] = [(xi, x)]
        # erster Schritt klein, nahe am Fold liegen die Äste dicht beieinander
        step = min(self.step, abs(xi_target - xi), 1e-6)
        while (xi_target - xi) * direction > 0.0:
            xi_next = xi + direction * min(step, abs(xi_target - xi))
            if len(history) > 1:
                (p0, u0), (p1, u1) = history[-2], history[-1]
                guess = u1 + (u1 - u0) / (p1 - p0) * (xi_next - p1)
            else:
                guess = x
            x = self.solve_x(xi_next, guess)
            xi = xi_next
            history.append((xi, x))
            step = min(step * 2.0, self.step)
        self.logger.info(f"Seed {which}: x({xi_target!r}) ~ {x!r}")
        return x

    def refine_fold(self) -> Tuple[float, float]:
        """Newton für H = (G, G_x) ohne Rundungskontrolle"""
        def H(v):
            shot = shoot(float(v[0]), float(v[1]))
            return [shot.value, shot.d_dx]

        root, info, ier, msg = fsolve(H, list(self.fold_seed()), full_output=True, xtol=1e-14)
        if ier != 1 and max(abs(v) for v in info["fvec"]) > RESIDUAL_LIMIT:
            raise SeedError(f"Fold-Verfeinerung: {msg}")
        self.logger.info(f"Fold-Seed verfeinert: xi={root[0]!r}, x={root[1]!r}")
        return float(root[0]), float(root[1])

    def regenerate(self) -> Dict:
        """Seed-Datei neu berechnen: Fold und beide Äste bei xi_*"""
        xi_f, x_f = self.refine_fold()
        result = {"fold": {"xi": xi_f, "x": x_f}, "xi_threshold": XI_THRESHOLD, "branches": {}}
        offset = 1e-4
        for which, sign in (("upper", 1.0), ("lower", -1.0)):
            x = self.solve_x(XI_THRESHOLD, x_f + sign * offset * 0.5)
            result["branches"][which] = {"xi": XI_THRESHOLD, "x": x}
        return result


def write_seeds(seeds: Dict, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(seeds, f, indent=2, sort_keys=True)
        f.write("\n")
    return path
