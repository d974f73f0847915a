"""Boundary-condition symbols of Poincare-type sides.

A side condition  sin(beta) dq/dN + cos(beta) dq/dT + gamma q = f  enters the
global relation through

    H(k)    = k e^{i beta} + lambda/(k e^{i beta}) - gamma,
    Hbar(k) = k e^{-i beta} + lambda/(k e^{-i beta}) - gamma,
    P(k)    = H(k) / Hbar(k),

where Hbar is the Schwarz conjugate, Hbar(k) = conj(H(conj(k))) for real
parameters.  Analytic k-derivatives are provided for the root finding and
residue computations downstream.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class SideSymbol:
    """H/P evaluator for one side condition (lambda, beta, gamma)."""

    lam: float
    beta: float
    gamma: float

    @property
    def phase(self) -> complex:
        return cmath.exp(1j * self.beta)

    def h(self, k: complex) -> complex:
        if k == 0:
            raise DomainError("H(k) undefined at k = 0")
        w = k * self.phase
        return w + self.lam / w - self.gamma

    def hbar(self, k: complex) -> complex:
        if k == 0:
            raise DomainError("Hbar(k) undefined at k = 0")
        w = k / self.phase
        return w + self.lam / w - self.gamma

    def dh(self, k: complex) -> complex:
        w = k * self.phase
        return self.phase * (1.0 - self.lam / (w * w))

    def dhbar(self, k: complex) -> complex:
        w = k / self.phase
        return (1.0 - self.lam / (w * w)) / self.phase

    def p(self, k: complex) -> complex:
        return self.h(k) / self.hbar(k)

    def dp(self, k: complex) -> complex:
        hb = self.hbar(k)
        return (self.dh(k) * hb - self.h(k) * self.dhbar(k)) / (hb * hb)

    def h_product(self, k: complex) -> complex:
        """H(k) H(alpha k) H(alpha_bar k), which collapses to
        k^3 e^{3 i beta} + lambda^3/(k^3 e^{3 i beta}) + 3 lambda gamma - gamma^3."""
        w3 = (k * self.phase) ** 3
        return w3 + self.lam**3 / w3 + 3.0 * self.lam * self.gamma - self.gamma**3
