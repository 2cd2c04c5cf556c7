#!/usr/bin/env python3
"""
Fold-Prover - Requirements Check Script
Prüft Interpreter, Abhängigkeiten und Gleitkomma-Eigenschaften
"""

import importlib
import json
import logging
import platform
import sys
from pathlib import Path
from typing import Dict

import numpy as np

# Projekt-Root zum Python-Pfad hinzufügen
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

REQUIRED_PACKAGES = {
    "numpy": ("numpy", "1.24.0"),
    "scipy": ("scipy", "1.10.0"),
    "pyyaml": ("yaml", "6.0.0"),
    "psutil": ("psutil", "5.9.0"),
}
OPTIONAL_PACKAGES = {
    "pytest": ("pytest", "7.4.0"),
}


def _version_tuple(text: str):
    parts = []
    for piece in text.split(".")[:3]:
        digits = "".join(ch for ch in piece if ch.isdigit())
        parts.append(int(digits) if digits else 0)
    return tuple(parts)


class RequirementsChecker:
    """Prüft Laufzeit-Anforderungen des Fold-Provers"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.results = {
            "system_check": {},
            "python_check": {},
            "dependencies_check": {},
            "hardware_check": {},
            "float_check": {},
            "overall_status": "unknown"
        }

    def run_full_check(self) -> Dict:
        """Führt vollständige Anforderungsprüfung durch"""
        self.logger.info("Starte Anforderungsprüfung...")

        self.results["system_check"] = self.check_system_requirements()
        self.results["python_check"] = self.check_python_requirements()
        self.results["dependencies_check"] = self.check_dependencies()
        self.results["hardware_check"] = self.check_hardware_requirements()
        self.results["float_check"] = self.check_float_environment()
        self.results["overall_status"] = self.determine_overall_status()

        return self.results

    def check_system_requirements(self) -> Dict:
        return {
            "os": platform.system().lower(),
            "os_supported": True,
            "architecture": platform.architecture()[0],
            "machine": platform.machine(),
        }

    def check_python_requirements(self) -> Dict:
        """Prüft Python-Version"""
        required = (3, 9, 0)
        result = {
            "python_version": sys.version.split()[0],
            "required_version": ".".join(map(str, required)),
            "version_compatible": sys.version_info >= required,
        }
        if not result["version_compatible"]:
            result["error"] = f"Python {result['required_version']} oder höher erforderlich"
        return result

    def check_dependencies(self) -> Dict:
        """Prüft Python-Abhängigkeiten"""
        result = {
            "required_packages": {},
            "optional_packages": {},
            "missing_required": [],
            "missing_optional": []
        }
        for group, packages, missing in (("required_packages", REQUIRED_PACKAGES, "missing_required"),
                                         ("optional_packages", OPTIONAL_PACKAGES, "missing_optional")):
            for package, (module_name, min_version) in packages.items():
                status = self.check_package(module_name, min_version)
                result[group][package] = status
                if not status["installed"]:
                    result[missing].append(package)
        return result

    def check_package(self, module_name: str, min_version: str) -> Dict:
        """Prüft einzelnes Python-Paket"""
        try:
            module = importlib.import_module(module_name)
        except ImportError:
            return {"installed": False, "version": None, "version_ok": False}
        version = getattr(module, "__version__", "unknown")
        version_ok = version == "unknown" or _version_tuple(version) >= _version_tuple(min_version)
        return {"installed": True, "version": version, "version_ok": version_ok}

    def check_hardware_requirements(self) -> Dict:
        """Prüft CPU und Speicher, empfiehlt --threads"""
        result = {}
        try:
            import psutil

            result["cpu_cores"] = psutil.cpu_count(logical=False) or psutil.cpu_count(logical=True)
            result["recommended_threads"] = max(1, (result["cpu_cores"] or 1) - 1)

            memory_bytes = psutil.virtual_memory().total
            result["memory_gb"] = memory_bytes / (1024**3)
            result["memory_ok"] = result["memory_gb"] >= 2

        except ImportError:
            result["error"] = "psutil nicht verfügbar für Hardware-Check"

        return result

    def check_float_environment(self) -> Dict:
        """IEEE-754 double mit Rundung zum Nächsten und korrekt gerundetem sqrt"""
        info = np.finfo(np.float64)
        one_third = 1.0 / 3.0
        result = {
            "mantissa_bits": int(info.nmant) + 1,
            "epsilon": float(info.eps),
            "round_to_nearest": (1.0 + info.eps / 2.0) == 1.0 and (1.0 + info.eps) > 1.0,
            "sqrt_correct": np.sqrt(2.0) == 1.4142135623730951,
            "division_correct": one_third == 0.3333333333333333,
            "nextafter_available": np.nextafter(1.0, 2.0) > 1.0,
        }
        result["ieee_double"] = result["mantissa_bits"] == 53
        return result

    def determine_overall_status(self) -> str:
        """Bestimmt Gesamtstatus"""
        if not self.results["python_check"].get("version_compatible", False):
            return "python_incompatible"
        if self.results["dependencies_check"].get("missing_required"):
            return "missing_dependencies"
        floats = self.results["float_check"]
        if not all(floats[k] for k in ("ieee_double", "round_to_nearest", "sqrt_correct",
                                        "division_correct", "nextafter_available")):
            return "float_environment_unsupported"
        return "ready"

    def generate_report(self) -> str:
        """Generiert Bericht"""
        report = [
            "=" * 60,
            "FOLD-PROVER - ANFORDERUNGSPRÜFUNG",
            "=" * 60,
            f"Status: {self.results['overall_status']}",
            f"Python: {self.results['python_check']['python_version']}",
        ]
        hardware = self.results["hardware_check"]
        if "recommended_threads" in hardware:
            report.append(f"CPU-Kerne: {hardware['cpu_cores']}, empfohlen: --threads {hardware['recommended_threads']}")
        deps = self.results["dependencies_check"]
        for package, status in deps["required_packages"].items():
            report.append(f"  {package}: {status['version'] if status['installed'] else 'fehlt'}")
        if deps["missing_required"]:
            report.append(f"\nFehlende erforderliche Pakete: {', '.join(deps['missing_required'])}")
        if deps["missing_optional"]:
            report.append(f"Fehlende optionale Pakete: {', '.join(deps['missing_optional'])}")
        return "\n".join(report)

    def save_report(self, filename: str = "requirements_report.json"):
        """Speichert detaillierten Bericht"""
        with open(filename, 'w', encoding='utf-8') as f:
            json.dump(self.results, f, indent=2, default=str)
        self.logger.info(f"Anforderungsbericht gespeichert in {filename}")


def main():
    """Hauptfunktion"""
    logging.basicConfig(level=logging.INFO)

    checker = RequirementsChecker()
    results = checker.run_full_check()

    print(checker.generate_report())
    checker.save_report()

    sys.exit(0 if results["overall_status"] == "ready" else 1)


if __name__ == "__main__":
    main()
