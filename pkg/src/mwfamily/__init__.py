"""Exact and certified computations on the curves y^2 = x^3 - m^2 x + n^2."""

__version__ = "0.1.0"
