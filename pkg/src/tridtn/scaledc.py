"""Exponent-carrying complex arithmetic.

Contour integrands and residue terms in this package are ratios of products
of exponentials whose individual factors overflow double precision long
before the ratio does.  ``Scaled`` stores x = m * exp(sigma) with a complex
mantissa ``m`` and a real exponent ``sigma``; products add exponents, sums
rescale to the largest exponent, and only the final ratio is collapsed to a
plain complex number.  All operations broadcast over numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_COLLAPSE_LIMIT = 700.0  # exp() overflow guard


@dataclass(frozen=True)
class Scaled:
    """Value m * exp(sigma) with real sigma; broadcastable arrays allowed."""

    m: np.ndarray
    sigma: np.ndarray

    @classmethod
    def of(cls, value) -> "Scaled":
        value = np.asarray(value, dtype=complex)
        return cls(m=value, sigma=np.zeros(value.shape))

    @classmethod
    def from_exp(cls, w) -> "Scaled":
        """exp(w) for complex w of arbitrary magnitude."""
        w = np.asarray(w, dtype=complex)
        return cls(m=np.exp(1j * w.imag), sigma=np.asarray(w.real, dtype=float))

    def __mul__(self, other):
        other = _coerce(other)
        return Scaled(self.m * other.m, self.sigma + other.sigma)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        return Scaled(self.m / other.m, self.sigma - other.sigma)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __neg__(self):
        return Scaled(-self.m, self.sigma)

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)):
            return NotImplemented
        base = self.normalized()
        return Scaled(base.m**n, n * base.sigma)

    def __add__(self, other):
        other = _coerce(other)
        sig = np.maximum(self.sigma, other.sigma)
        # exp arguments are <= 0 on both branches; 0*exp(-inf) guarded below.
        with np.errstate(over="ignore"):
            m = self.m * np.exp(np.minimum(self.sigma - sig, 0.0)) + other.m * np.exp(
                np.minimum(other.sigma - sig, 0.0)
            )
        return Scaled(m, sig)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def normalized(self) -> "Scaled":
        """Fold the mantissa magnitude into sigma (mantissa on unit circle)."""
        mag = np.abs(self.m)
        safe = np.where(mag > 0.0, mag, 1.0)
        return Scaled(self.m / safe, self.sigma + np.log(safe))

    def to_complex(self):
        """Collapse to complex; raises OverflowError if exp(sigma) overflows."""
        norm = self.normalized()
        if np.any(norm.sigma > _COLLAPSE_LIMIT):
            raise OverflowError("scaled value too large to collapse to complex")
        with np.errstate(under="ignore"):
            out = norm.m * np.exp(norm.sigma)
        return out if out.ndim else complex(out)

    def abs_log(self):
        """log |x| (elementwise, -inf for exact zeros)."""
        with np.errstate(divide="ignore"):
            out = np.log(np.abs(self.m)) + self.sigma
        return out if np.ndim(out) else float(out)


def _coerce(value) -> Scaled:
    return value if isinstance(value, Scaled) else Scaled.of(value)
