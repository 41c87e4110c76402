"""Exact semifree resolutions, derivation complexes and deformations of commutative algebras."""

__version__ = "0.1.0"
