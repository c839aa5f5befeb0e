"""Resonances and invariant Ruelle distributions on Schottky surfaces.

Subpackages build up from Moebius-map arithmetic through Schottky
surface data, symmetry reduction, weight integrals, and the cycle
expansion of the dynamical determinant, to resonance scans and
distribution grids with a CSV command line interface.
"""

__version__ = "0.1.0"

__all__ = [
    "moebius", "schottky", "symmetry", "weights", "kernels", "cycle",
    "spectra", "grids", "config", "cli",
]
