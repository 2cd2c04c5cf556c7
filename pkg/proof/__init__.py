"""Intervall-Newton, Fortsetzung, Fold und Zertifikate"""
