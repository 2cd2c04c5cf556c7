#!/usr/bin/env python3
"""
Fold-Prover - Benchmark Script
Misst die Laufzeit einer G-Auswertung in den Ordnungen 0, 1 und 2
"""

import argparse
import json
import logging
import platform
import sys
import time
from pathlib import Path
from typing import Dict

import psutil

# Projekt-Root zum Python-Pfad hinzufügen
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from dynamics.odeint import IntegratorConfig  # noqa: E402
from dynamics.poincare import eval_G  # noqa: E402
from numerics.interval import Interval  # noqa: E402


class PerformanceBenchmark:
    """Laufzeitmessung der rigorosen Poincaré-Auswertung"""

    def __init__(self, config: IntegratorConfig, repeats: int = 3):
        self.logger = logging.getLogger(__name__)
        self.config = config
        self.repeats = repeats
        self.results: Dict = {}

    def run_full_benchmark(self, xi: float = 2.0316516135713902,
                           x: float = -1.5824941113082425) -> Dict:
        """Führt alle Messungen durch"""
        self.logger.info("Starte Benchmark...")
        self.results = {
            "timestamp": time.time(),
            "system_info": self.get_system_info(),
            "point": {"xi": xi, "x": x},
            "taylor_order": self.config.taylor_order,
            "orders": {},
        }
        for order in (0, 1, 2):
            self.results["orders"][str(order)] = self.benchmark_order(order, xi, x)
        return self.results

    def get_system_info(self) -> Dict:
        """Sammelt System-Informationen"""
        return {
            "os": platform.system(),
            "processor": platform.processor(),
            "python": platform.python_version(),
            "cpu_count": psutil.cpu_count(),
            "cpu_logical": psutil.cpu_count(logical=True),
            "memory_total": psutil.virtual_memory().total,
        }

    def benchmark_order(self, order: int, xi: float, x: float) -> Dict:
        """Laufzeit und Breite von G in einer Ordnung"""
        self.logger.info(f"Ordnung {order} läuft...")
        times = []
        g = None
        for _ in range(self.repeats):
            start = time.time()
            g = eval_G(Interval(xi), Interval(x), self.config, order=order)
            times.append(time.time() - start)
        return {
            "seconds_min": min(times),
            "seconds_mean": sum(times) / len(times),
            "value_width": g.value.diam,
            "crossings": len(g.crossings),
        }

    def save_results(self, filename: str = "benchmark_results.json"):
        with open(filename, 'w', encoding='utf-8') as f:
            json.dump(self.results, f, indent=2)
        self.logger.info(f"Benchmark-Ergebnisse gespeichert: {filename}")


def main():
    """Hauptfunktion"""
    logging.basicConfig(level=logging.INFO,
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    parser = argparse.ArgumentParser(description="Laufzeit der G-Auswertung")
    parser.add_argument("--taylor-order", type=int, default=20)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--output", default="benchmark_results.json")
    args = parser.parse_args()

    benchmark = PerformanceBenchmark(IntegratorConfig(taylor_order=args.taylor_order), args.repeats)
    results = benchmark.run_full_benchmark()
    for order, stats in results["orders"].items():
        print(f"Ordnung {order}: {stats['seconds_min']:.2f}s, Breite {stats['value_width']:.3e}")
    benchmark.save_results(args.output)


if __name__ == "__main__":
    main()
