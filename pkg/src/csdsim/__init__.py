"""Pseudo-spectral Chern-Simons-Dirac simulator and exact exponent checker."""
__version__ = "0.1.0"
