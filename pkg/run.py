#!/usr/bin/env python3
"""
Fold-Prover - Startskript
Aufruf: python run.py <step1|step2|step3|step4|all|diagram|selftest> [Optionen]
"""

import sys
from pathlib import Path

# Projekt-Root zum Python-Pfad hinzufügen
sys.path.insert(0, str(Path(__file__).parent))

from prover.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
