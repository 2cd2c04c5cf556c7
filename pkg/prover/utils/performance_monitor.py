#!/usr/bin/env python3
"""
Performance Monitor - Laufzeit- und Ressourcenstatistik der Beweisschritte
Die Werte landen ausschließlich in run_report.json, nie in Zertifikaten.
"""
import json
import logging
import time
from pathlib import Path
from typing import Dict, Optional, Union

import psutil


class PerformanceMonitor:
    """Überwacht Laufzeit, CPU, Speicher und Zähler pro Kommando"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.process = psutil.Process()
        self.start_time = time.time()
        self.step_times: Dict[str, float] = {}
        self.counters: Dict[str, int] = {}
        self.segments: Dict[str, int] = {}
        self._current: Optional[str] = None
        self._current_start = 0.0

    def start(self):
        """Monitoring starten"""
        self.start_time = time.time()
        self.process.cpu_percent(interval=None)
        self.logger.info("Performance-Monitoring gestartet")

    def stop(self):
        """Monitoring stoppen"""
        self.end_step()
        self.logger.info(f"Performance-Monitoring gestoppt nach {time.time() - self.start_time:.1f}s")

    def begin_step(self, name: str):
        self.end_step()
        self._current = name
        self._current_start = time.time()

    def end_step(self):
        if self._current is not None:
            elapsed = time.time() - self._current_start
            self.step_times[self._current] = self.step_times.get(self._current, 0.0) + elapsed
            self.logger.info(f"{self._current} beendet in {elapsed:.1f}s")
            self._current = None

    def count(self, name: str, amount: int = 1):
        self.counters[name] = self.counters.get(name, 0) + amount

    def record_branch(self, name: str, segment_count: int):
        self.segments[name] = segment_count

    def get_stats(self) -> Dict:
        """Aktuelle Performance-Statistiken"""
        memory = self.process.memory_info()
        return {
            "uptime": time.time() - self.start_time,
            "step_times": dict(self.step_times),
            "counters": dict(self.counters),
            "segments": dict(self.segments),
            "cpu_percent": self.process.cpu_percent(interval=None),
            "memory_rss_mb": memory.rss / (1024 * 1024),
            "system_memory_percent": psutil.virtual_memory().percent,
            "cpu_count": psutil.cpu_count(logical=True),
        }

    def write_report(self, path: Union[str, Path], extra: Optional[Dict] = None) -> Path:
        """run_report.json schreiben"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        report = {"performance": self.get_stats(), **(extra or {})}
        with open(path, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2, sort_keys=True)
        self.logger.info(f"Laufbericht geschrieben: {path}")
        return path
