"""Damped fractional wave equations with singular coefficients, solved on a torus."""

__version__ = "0.1.0"
