"""Boundary trace containers.

A trace is a real-valued function of the side arclength s in [-l/2, l/2]
together with its tangential derivative.  Series solvers return
``FourierSeriesTrace`` objects whose carriers are exp(-2 pi i m s / (3 l));
the plain ``BoundaryTrace`` wraps arbitrary callables (manufactured
solutions, parsed expressions, interpolated grid data).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class BoundaryTrace:
    """Real function on one side: ``value(s)`` and its derivative in s."""

    side: int
    value: Callable
    derivative: Callable

    def __call__(self, s):
        return self.value(s)

    def d(self, s):
        return self.derivative(s)

    @classmethod
    def constant(cls, side: int, c: float) -> "BoundaryTrace":
        return cls(
            side=side,
            value=lambda s, c=c: np.broadcast_to(float(c), np.shape(s)).copy()
            if np.ndim(s)
            else float(c),
            derivative=lambda s: np.zeros(np.shape(s)) if np.ndim(s) else 0.0,
        )

    @classmethod
    def zero(cls, side: int) -> "BoundaryTrace":
        return cls.constant(side, 0.0)


@dataclass(frozen=True)
class FourierSeriesTrace:
    """Real part of sum_m coeff[m] exp(-2 pi i m s / (3 l)).

    ``modes`` holds the integer labels m; for single-side (period-l) series
    all labels are multiples of three.  ``imbalance`` records the maximum
    modulus of the imaginary part of the complex synthesis on a sample grid;
    for real data it should sit at roundoff level.
    """

    side: int
    side_length: float
    modes: np.ndarray
    coeffs: np.ndarray
    imbalance: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "modes", np.asarray(self.modes, dtype=int))
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))
        if self.modes.shape != self.coeffs.shape:
            raise ValueError("modes and coeffs must have matching shapes")

    @property
    def carriers(self) -> np.ndarray:
        """Carrier rates kappa_m = -2 pi i m / (3 l)."""
        return -2j * np.pi * self.modes / (3.0 * self.side_length)

    @property
    def quadrature_hint(self) -> int:
        """Minimum node count resolving the fastest carrier over one side.

        The highest mode completes |m|/3 oscillations per side length; a
        Gauss-Legendre rule needs a little over pi/2 nodes per cycle, so two
        per cycle plus a safety margin keeps transforms of the synthesized
        series at quadrature accuracy.
        """
        if self.modes.size == 0:
            return 0
        cycles = float(np.max(np.abs(self.modes))) / 3.0
        return int(math.ceil(2.0 * cycles)) + 16

    def synthesis(self, s):
        """Complex mode sum before taking the real part."""
        s = np.asarray(s, dtype=float)
        out = np.exp(np.multiply.outer(s, self.carriers)) @ self.coeffs
        return out if out.ndim else complex(out)

    def value(self, s):
        out = np.real(self.synthesis(s))
        return out if np.ndim(out) else float(out)

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        out = np.real(
            np.exp(np.multiply.outer(s, self.carriers)) @ (self.carriers * self.coeffs)
        )
        return out if out.ndim else float(out)

    def __call__(self, s):
        return self.value(s)

    def d(self, s):
        return self.derivative(s)

    def as_boundary_trace(self) -> BoundaryTrace:
        return BoundaryTrace(side=self.side, value=self.value, derivative=self.derivative)

    def mean(self) -> float:
        """Average over the side (the m = 0 coefficient, real part)."""
        sel = self.modes == 0
        return float(np.real(self.coeffs[sel].sum()))


def sample_grid(side_length: float, n: int = 512, corner_margin: float = 0.02):
    """Uniform s-grid excluding a relative margin at both corners."""
    half = side_length / 2.0 - corner_margin * side_length
    return np.linspace(-half, half, n)


def compare_traces(a, b, side_length: float, n: int = 512, corner_margin: float = 0.02):
    """Max-norm discrepancy of two traces away from the corners.

    ``a`` and ``b`` may be BoundaryTrace/FourierSeriesTrace objects or plain
    callables of s.
    """
    s = sample_grid(side_length, n=n, corner_margin=corner_margin)
    va = np.asarray(a(s), dtype=float)
    vb = np.asarray(b(s), dtype=float)
    return float(np.max(np.abs(va - vb)))
