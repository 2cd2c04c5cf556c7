#!/usr/bin/env python3
"""
Fold-Prover - Seeds neu erzeugen
Verfeinert den Fold-Seed nichtrigoros und berechnet beide Äste bei xi_*.
"""

import argparse
import logging
import sys
from pathlib import Path

# Projekt-Root zum Python-Pfad hinzufügen
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from prover.seeds import SeedGenerator, write_seeds  # noqa: E402


def main():
    logging.basicConfig(level=logging.INFO,
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    parser = argparse.ArgumentParser(description="Warmstart-Seeds berechnen")
    parser.add_argument("--seed-file", default="config/seeds.json",
                        help="Vorhandene Seeds als Startwerte")
    parser.add_argument("--output", default="config/seeds.json")
    args = parser.parse_args()

    seeds = SeedGenerator.from_file(args.seed_file).regenerate()
    path = write_seeds(seeds, args.output)
    print(f"Seeds geschrieben: {path}")


if __name__ == "__main__":
    main()
