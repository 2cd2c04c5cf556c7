"""
Fold-Prover - computergestützter Beweis des Umkehrpunkts gerader periodischer
Lösungen des Swift-Hohenberg-Systems im Energieniveau E=0
"""

__version__ = "1.0.0"
