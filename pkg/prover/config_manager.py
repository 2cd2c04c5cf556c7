#!/usr/bin/env python3
"""
Config Manager - Konfigurationsverwaltung für den Fold-Prover
Lädt config/prover_config.yaml, legt sie bei Bedarf mit Standardwerten an,
überlagert Kommandozeilen-Optionen und validiert vor jeder Rechnung.
"""

import copy
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml

from dynamics.model import XI_THRESHOLD
from dynamics.odeint import REPRESENTATIONS, IntegratorConfig
from numerics.interval import ProverError
from proof.continuation import ContinuationPolicy

DESK_SCALE_RANGE_START = 1.5
XI_MAX = math.sqrt(8.0)
COMMANDS = ("step1", "step2", "step3", "step4", "all", "diagram", "selftest")


class ConfigError(ProverError):
    """Ungültige Konfiguration oder fehlende Eingaben"""


@dataclass
class PolicyConfig:
    initial_fraction: float = 1.0 / 1024.0
    growth: float = 1.5
    max_fraction: float = 1.0 / 16.0
    inflation: float = 2.0
    initial_radius: float = 1e-7
    min_fraction: float = 1e-12
    slope_margin: float = 0.5


@dataclass
class RunConfig:
    command: str = "all"
    taylor_order: int = 20
    tolerance: float = 1e-14
    min_step: float = 1e-6
    max_step: float = 0.5
    representation: str = "doubleton"
    range_lo: Optional[float] = None
    range_hi: Optional[float] = None
    seed_file: str = "config/seeds.json"
    out_dir: str = "out"
    threads: int = 1
    desk_scale: bool = True
    full_range: bool = False
    fold_radius: float = 1e-10
    wave_size: int = 4
    allow_partial: bool = False
    trace: bool = False
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    log_level: str = "INFO"

    # Abgeleitete Größen -------------------------------------------------------

    def branch_range(self) -> Tuple[float, float]:
        """Parameterbereich der Äste x+ und x- in xi"""
        lo = self.range_lo
        hi = self.range_hi if self.range_hi is not None else XI_THRESHOLD
        if lo is None:
            lo = 0.0 if self.full_range else DESK_SCALE_RANGE_START
        return lo, hi

    def integrator(self, trace_path: Optional[str] = None) -> IntegratorConfig:
        return IntegratorConfig(
            taylor_order=self.taylor_order,
            tolerance=self.tolerance,
            min_step=self.min_step,
            max_step=self.max_step,
            representation=self.representation,
            trace_path=trace_path if self.trace else None,
        )

    def continuation_policy(self) -> ContinuationPolicy:
        return ContinuationPolicy(threads=self.threads, wave_size=self.wave_size,
                                  **asdict(self.policy))

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"Unbekanntes Kommando: {self.command}")
        if self.taylor_order < 3:
            raise ConfigError(f"taylor_order muss >= 3 sein, ist {self.taylor_order}")
        if not (0.0 < self.min_step <= self.max_step):
            raise ConfigError(f"Ungültige Schrittweiten: min={self.min_step}, max={self.max_step}")
        if not self.tolerance > 0.0:
            raise ConfigError(f"tolerance muss positiv sein, ist {self.tolerance}")
        if self.threads < 1:
            raise ConfigError(f"threads muss >= 1 sein, ist {self.threads}")
        if self.wave_size < 1:
            raise ConfigError(f"wave_size muss >= 1 sein, ist {self.wave_size}")
        if self.representation not in REPRESENTATIONS:
            raise ConfigError(f"Unbekannte Darstellung: {self.representation}")
        if not self.fold_radius > 0.0:
            raise ConfigError(f"fold_radius muss positiv sein, ist {self.fold_radius}")
        lo, hi = self.branch_range()
        if not lo < hi:
            raise ConfigError(f"Leerer Bereich [{lo}, {hi}]")
        if lo < 0.0 or hi > XI_MAX:
            raise ConfigError(f"Bereich [{lo}, {hi}] nicht in [0, sqrt(8)]")
        p = self.policy
        if not (0.0 < p.min_fraction <= p.initial_fraction <= p.max_fraction <= 1.0):
            raise ConfigError("Ungültige Segmentbreiten der Fortsetzung")
        if p.growth < 1.0 or p.inflation <= 1.0 or p.initial_radius <= 0.0 or p.slope_margin < 0.0:
            raise ConfigError("Ungültige Wachstums- oder Aufblähfaktoren der Fortsetzung")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def certificate_dict(self) -> Dict[str, Any]:
        """Ergebnisrelevante Einstellungen; Threads und Pfade bleiben draußen"""
        lo, hi = self.branch_range()
        return {
            "taylor_order": self.taylor_order,
            "tolerance": self.tolerance.hex(),
            "min_step": self.min_step.hex(),
            "max_step": self.max_step.hex(),
            "representation": self.representation,
            "range": [lo.hex(), hi.hex()],
            "fold_radius": self.fold_radius.hex(),
            "wave_size": self.wave_size,
            "policy": {k: float(v).hex() for k, v in asdict(self.policy).items()},
        }


def parse_range(text: str) -> Tuple[float, float]:
    """'lo:hi'; hi darf 'xi*' für den Schwellwert sein"""
    try:
        lo_text, hi_text = text.split(":")
        lo = float(lo_text)
        hi = XI_THRESHOLD if hi_text.strip().lower() in ("xi*", "xi_*", "xistar", "") else float(hi_text)
    except ValueError as exc:
        raise ConfigError(f"Ungültiger Bereich '{text}', erwartet lo:hi") from exc
    return lo, hi


class ConfigManager:
    """Konfigurationsmanager für Beweisläufe"""

    def __init__(self, config_dir: str = "config"):
        self.logger = logging.getLogger(__name__)
        self.config_dir = Path(config_dir)
        self.config_file = self.config_dir / "prover_config.yaml"
        self.prover_config: Dict[str, Any] = {}

        self.config_dir.mkdir(parents=True, exist_ok=True)
        self.logger.debug("ConfigManager initialisiert")

    def load_config(self) -> Dict[str, Any]:
        """Konfiguration laden"""
        self._load_prover_config()
        return self.prover_config

    def _load_prover_config(self):
        if not self.config_file.exists():
            self._create_default_config()

        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                loaded = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Fehler beim Laden von {self.config_file}: {e}") from e
        if not isinstance(loaded, dict):
            raise ConfigError(f"{self.config_file}: Wurzel muss ein Mapping sein")
        self.prover_config = self._get_default_config()
        self._deep_update(self.prover_config, loaded)
        self.logger.debug("Prover-Konfiguration geladen")

    def _create_default_config(self):
        """Standard-Konfiguration erstellen"""
        try:
            with open(self.config_file, 'w', encoding='utf-8') as f:
                yaml.dump(self._get_default_config(), f, default_flow_style=False, indent=2)
            self.logger.info(f"Standard-Konfiguration erstellt: {self.config_file}")
        except OSError as e:
            self.logger.error(f"Fehler beim Erstellen der Standard-Konfiguration: {e}")

    def _get_default_config(self) -> Dict[str, Any]:
        """Standard-Konfiguration"""
        return {
            "integrator": {
                "taylor_order": 20,
                "tolerance": 1e-14,
                "min_step": 1e-6,
                "max_step": 0.5,
                "representation": "doubleton",
            },
            "continuation": {
                "threads": 1,
                "wave_size": 4,
                "initial_fraction": 1.0 / 1024.0,
                "growth": 1.5,
                "max_fraction": 1.0 / 16.0,
                "inflation": 2.0,
                "initial_radius": 1e-7,
                "min_fraction": 1e-12,
                "slope_margin": 0.5,
            },
            "run": {
                "desk_scale": True,
                "full_range": False,
                "range": None,
                "seed_file": "config/seeds.json",
                "out_dir": "out",
                "fold_radius": 1e-10,
                "allow_partial": False,
                "trace": False,
            },
            "logging": {
                "level": "INFO",
                "file": "logs/prover.log",
            },
        }

    def _deep_update(self, target: Dict, source: Dict):
        for key, value in source.items():
            if isinstance(value, dict) and isinstance(target.get(key), dict):
                self._deep_update(target[key], value)
            else:
                target[key] = value

    def build_run_config(self, command: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        """RunConfig aus YAML und Kommandozeilen-Overrides (None = nicht gesetzt)"""
        data = copy.deepcopy(self.prover_config or self.load_config())
        integ, cont, run = data["integrator"], data["continuation"], data["run"]

        cfg = RunConfig(
            command=command,
            taylor_order=int(integ["taylor_order"]),
            tolerance=float(integ["tolerance"]),
            min_step=float(integ["min_step"]),
            max_step=float(integ["max_step"]),
            representation=str(integ["representation"]),
            seed_file=str(run["seed_file"]),
            out_dir=str(run["out_dir"]),
            threads=int(cont["threads"]),
            desk_scale=bool(run["desk_scale"]),
            full_range=bool(run["full_range"]),
            fold_radius=float(run["fold_radius"]),
            wave_size=int(cont["wave_size"]),
            allow_partial=bool(run["allow_partial"]),
            trace=bool(run["trace"]),
            policy=PolicyConfig(**{k: float(cont[k]) for k in asdict(PolicyConfig())}),
            log_level=str(data["logging"]["level"]),
        )
        if run.get("range"):
            cfg.range_lo, cfg.range_hi = parse_range(str(run["range"]))

        overrides = overrides or {}
        if overrides.get("desk_scale") and overrides.get("full_range"):
            raise ConfigError("--desk-scale und --full-range schließen sich aus")
        for key, value in overrides.items():
            if value is None:
                continue
            if key == "range":
                cfg.range_lo, cfg.range_hi = parse_range(value)
            elif hasattr(cfg, key):
                setattr(cfg, key, value)
            else:
                raise ConfigError(f"Unbekannte Option: {key}")
        if overrides.get("desk_scale"):
            cfg.full_range = False
        if cfg.full_range:
            cfg.desk_scale = False

        cfg.validate()
        self.logger.info(f"Konfiguration für {command}: Ordnung {cfg.taylor_order}, "
                         f"Bereich {cfg.branch_range()}, Threads {cfg.threads}")
        return cfg
