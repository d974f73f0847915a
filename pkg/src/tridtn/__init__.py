"""Dirichlet-to-Neumann maps and interior fields on an equilateral triangle
computed from the global relation of the boundary spectral transforms."""

from .geometry import ALPHA, ALPHA_BAR, TriangleGeometry, exp_E, exp_e, mu

__all__ = [
    "ALPHA",
    "ALPHA_BAR",
    "TriangleGeometry",
    "exp_E",
    "exp_e",
    "mu",
]

__version__ = "0.1.0"
