"""Symmetries and conserved currents of source-free Maxwell theory with joint potentials."""

__version__ = "0.1.0"
