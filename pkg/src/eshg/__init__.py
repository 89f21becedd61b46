"""Numerical verification toolkit for elliptic Selberg-type integrals,
their finitely supported discrete companions, and the catalog of their
q-level degenerations."""

__version__ = "0.1.0"
