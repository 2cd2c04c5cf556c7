"""Modell, rigorose Integration und Poincaré-Abbildungen"""
