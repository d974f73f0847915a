"""Interior evaluation of the field q(x, y).

Three independent representations are provided and cross-checked:

* ``greens_eval`` -- the classical boundary-integral representation
  q = (1/2pi) contour-int [K dq/dn' - q dK/dn'] dl' with the modified Bessel
  kernel K_0(2 sqrt(lam) R) (logarithmic kernel for lam = 0),
* ``fokas_eval`` -- the ray representation
  q = (1/2pi i) sum_j int_{l_j} e^{ikz + (lam/ik) zbar} rho~_j(k) dk/k
  over the three rays at arguments -pi/2, pi/6, 5pi/6,
* ``symmetric_interior`` -- for the symmetric Dirichlet problem, the ray
  integrals of the known data plus the residue series over the mode roots
  s_n, bypassing the Neumann trace entirely.

All three need both phases and magnitudes over an exponentially large
dynamic range near k = 0; products are therefore assembled in the Scaled
representation and collapsed to complex only once per quadrature node.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_k0, bessel_k1
from .errors import AccuracyError, DomainError, ParameterError
from .geometry import ALPHA, ALPHA_BAR, SQRT3, TriangleGeometry, mu
from .poincare import (
    _delta_prime_scaled,
    _delta_scaled,
    _symmetric_g_scaled,
    dirichlet_mode_roots,
    quadratic_mode_root,
)
from .quadrature import _leggauss
from .scaledc import Scaled
from .spectral import Kind, SideSampler

#: Rotation factors a_j multiplying k in rho~_j(k) = rho_j(a_j k).
_RAY_ROT = (1.0 + 0.0j, ALPHA_BAR, ALPHA)

#: Ray arguments of l_1, l_2, l_3.
RAY_ARGS = (-math.pi / 2.0, math.pi / 6.0, 5.0 * math.pi / 6.0)


@dataclass(frozen=True)
class InteriorPoint:
    """An evaluation point strictly inside the triangle."""

    z: complex
    margin: float

    @classmethod
    def locate(cls, z: complex, geometry: TriangleGeometry) -> "InteriorPoint":
        margin = geometry.boundary_margin(z)
        if margin <= 0.0:
            raise DomainError(
                f"evaluation point {z} lies outside the triangle "
                f"(margin {margin:.3e})"
            )
        return cls(z=complex(z), margin=float(margin))


@dataclass(frozen=True)
class TraceSet:
    """Dirichlet and Neumann traces on all three sides."""

    geometry: TriangleGeometry
    dirichlet: tuple
    neumann: tuple

    def __post_init__(self):
        if len(self.dirichlet) != 3 or len(self.neumann) != 3:
            raise ParameterError("TraceSet needs exactly three traces per kind")

    @classmethod
    def from_solution(cls, sol, geometry: TriangleGeometry) -> "TraceSet":
        from .oracle import dirichlet_trace, neumann_trace

        return cls(
            geometry=geometry,
            dirichlet=tuple(dirichlet_trace(sol, geometry, j) for j in (1, 2, 3)),
            neumann=tuple(neumann_trace(sol, geometry, j) for j in (1, 2, 3)),
        )


# -- kernel ----------------------------------------------------------------
def kernel_K(x, lam):
    """Radial kernel of the Green's representation.

    K_0(x) for lam > 0 and -ln(x) for lam = 0 (where the representation
    uses K(|r - r'|) directly instead of K(2 sqrt(lam)|r - r'|)).
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        raise DomainError("kernel_K requires x > 0")
    if lam < 0.0:
        raise DomainError("kernel_K supports lam >= 0 only")
    if lam == 0.0:
        out = -np.log(arr)
        return out if arr.ndim else float(out)
    return bessel_k0(arr)


# -- Green's representation ------------------------------------------------
def _side_rule(side_length: float, margin: float, order: int):
    """Composite per-side Gauss-Legendre rule resolving scale ``margin``."""
    n_panels = max(4, int(math.ceil(side_length / margin)))
    base_x, base_w = _leggauss(order)
    edges = np.linspace(-side_length / 2.0, side_length / 2.0, n_panels + 1)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        nodes.append(0.5 * (a + b) + half * base_x)
        weights.append(half * base_w)
    return np.concatenate(nodes), np.concatenate(weights)


def greens_eval(traces: TraceSet, lam: float, z, order: int = 16) -> float:
    """q(z) from the boundary-integral representation.

    The normal kernel derivative is analytic: for lam > 0,
    d/dn' K_0(2 sqrt(lam) R) = -2 sqrt(lam) K_1(2 sqrt(lam) R) (n'.(r'-r))/R,
    and for lam = 0 the kernel is -ln R with d/dn' = -(n'.(r'-r))/R^2.
    """
    geom = traces.geometry
    point = z if isinstance(z, InteriorPoint) else InteriorPoint.locate(z, geom)
    if point.margin < 1e-3 * geom.side_length:
        raise AccuracyError(
            "evaluation point is too close to the boundary for the "
            f"Green's quadrature (margin {point.margin:.3e})"
        )
    s, w = _side_rule(geom.side_length, point.margin, order)
    total = 0.0
    root = 2.0 * math.sqrt(lam) if lam > 0.0 else 0.0
    for j in (1, 2, 3):
        zp = geom.side_point(j, s)
        n_hat = geom.side_normal(j)
        diff = zp - point.z
        r_dist = np.abs(diff)
        # n'.(r' - r) as a real inner product of complex directions
        proj = np.real(np.conj(n_hat) * diff)
        if lam > 0.0:
            kval = bessel_k0(root * r_dist)
            dk = -root * bessel_k1(root * r_dist) * proj / r_dist
        else:
            kval = -np.log(r_dist)
            dk = -proj / r_dist**2
        qn = np.asarray([traces.neumann[j - 1](si) for si in s], dtype=float)
        qd = np.asarray([traces.dirichlet[j - 1](si) for si in s], dtype=float)
        total += float(np.sum(w * (kval * qn - qd * dk)))
    return total / (2.0 * math.pi)


# -- the ray representation ------------------------------------------------
@dataclass(frozen=True)
class RayContour:
    """Panelled quadrature along the rays l_1, l_2, l_3.

    Panels grow geometrically from ``r_min`` until their width reaches the
    oscillation cap, then continue uniformly up to the truncation radius.
    """

    side_length: float
    truncation: float
    r_min: float = 0.0
    order: int = 16
    growth: float = 4.0

    def radii(self):
        r_min = self.r_min or 1e-6 * (2.0 * SQRT3 / self.side_length)
        cap = 5.0 / self.side_length
        base_x, base_w = _leggauss(self.order)
        nodes, weights = [], []
        lo = r_min
        while lo < self.truncation:
            width = min((self.growth - 1.0) * lo, cap)
            hi = min(lo + width, self.truncation)
            half = 0.5 * (hi - lo)
            nodes.append(0.5 * (lo + hi) + half * base_x)
            weights.append(half * base_w)
            lo = hi
        return np.concatenate(nodes), np.concatenate(weights)

    def nodes(self, ray: int):
        """(k, dk-weights) along ray ``ray`` (1, 2 or 3)."""
        r, w = self.radii()
        direction = cmath.exp(1j * RAY_ARGS[ray - 1])
        return r * direction, w * direction


def _distance_to_side(geom: TriangleGeometry, z: complex, j: int) -> float:
    rot = (1.0 + 0.0j, ALPHA_BAR, ALPHA)[j - 1]
    return geom.inradius - (z * np.conj(rot)).real


def _ray_phase(k, z, lam) -> Scaled:
    """exp{ i k z + (lam/(ik)) zbar } as a Scaled value (vectorised)."""
    k = np.asarray(k, dtype=complex)
    return Scaled.from_exp(1j * k * z + lam * np.conj(z) / (1j * k))


class _RhoTilde:
    """Scaled evaluators of rho~_j(k) = E(-i a_j k)[i/2 Psi_j + Phi_j](a_j k)."""

    def __init__(self, traces: TraceSet, lam: float):
        side_length = traces.geometry.side_length
        self.lam = lam
        self.side_length = side_length
        self._psi = [
            SideSampler(t, Kind.PSI, lam, side_length) for t in traces.neumann
        ]
        self._phi = [
            SideSampler(t, Kind.PHI, lam, side_length) for t in traces.dirichlet
        ]

    def eval(self, side: int, k) -> Scaled:
        arg = _RAY_ROT[side - 1] * np.asarray(k, dtype=complex)
        env = Scaled.from_exp(mu(-1j * arg, self.lam) * (self.side_length / (2.0 * SQRT3)))
        j = side - 1
        return env * (
            0.5j * self._psi[j].eval_scaled(arg) + self._phi[j].eval_scaled(arg)
        )


def fokas_eval(
    traces: TraceSet,
    lam: float,
    z,
    order: int = 24,
    tail: float = 36.0,
) -> float:
    """q(z) from the ray representation (lam > 0 only).

    On ray l_j the integrand decays like exp{-(r + lam/r) d_j} with d_j the
    distance from z to side j, which sets both the truncation radius and an
    a-priori tail bound.
    """
    if lam <= 0.0:
        raise ParameterError("the ray representation requires lam > 0")
    geom = traces.geometry
    point = z if isinstance(z, InteriorPoint) else InteriorPoint.locate(z, geom)
    rho = _RhoTilde(traces, lam)
    total = 0.0 + 0.0j
    for j in (1, 2, 3):
        dist = _distance_to_side(geom, point.z, j)
        contour = RayContour(
            side_length=geom.side_length, truncation=tail / dist, order=order
        )
        k, w = contour.nodes(j)
        vals = _ray_phase(k, point.z, lam) * rho.eval(j, k)
        total += np.sum(w / k * np.asarray(vals.to_complex(), dtype=complex))
    return float((total / (2j * math.pi)).real)


# -- the symmetric Dirichlet problem ---------------------------------------
def _symmetric_g_conj_scaled(sampler, k, lam, side_length) -> Scaled:
    """The Schwarz conjugate conj(G(conj k)) for real symmetric data."""
    half = side_length / 2.0
    k = np.asarray(k, dtype=complex)
    m = mu(k, lam)
    m_a = mu(ALPHA * k, lam)
    out = (Scaled.from_exp(m_a * half) + Scaled.from_exp(-m_a * half)) * sampler.eval_scaled(k)
    out = out + (Scaled.from_exp(m * half) + Scaled.from_exp(-m * half)) * sampler.eval_scaled(
        ALPHA * k
    )
    return out + 2.0 * sampler.eval_scaled(ALPHA_BAR * k)


def symmetric_interior(
    f,
    lam: float,
    z,
    geometry: TriangleGeometry | None = None,
    n_max: int = 64,
    order: int = 16,
    tail: float = 36.0,
) -> float:
    """q(z) for the symmetric Dirichlet problem directly from the data f.

    The representation splits into the known ray integrals (the F part of
    rho~_j plus the G/Delta terms produced by eliminating the rotated
    Psi arguments) and the residue series over the mode roots s_n: the
    upper-half roots s_n^+ contribute in full, the lower-half roots s_n^-
    are split in two halves carrying the two rotated short kernels.
    """
    if lam <= 0.0:
        raise ParameterError("the symmetric ray representation requires lam > 0")
    geom = geometry or TriangleGeometry()
    point = z if isinstance(z, InteriorPoint) else InteriorPoint.locate(z, geom)
    side_length = geom.side_length
    sampler = SideSampler(f, Kind.F_DIRICHLET, lam, side_length)
    margin = point.margin

    total = 0.0 + 0.0j
    for j in (1, 2, 3):
        dist = _distance_to_side(geom, point.z, j)
        contour = RayContour(side_length=side_length, truncation=tail / dist, order=order)
        k, w = contour.nodes(j)
        arg = _RAY_ROT[j - 1] * k
        env = Scaled.from_exp(mu(-1j * arg, lam) * (side_length / (2.0 * SQRT3)))
        # known F part of rho~_j
        vals = _ray_phase(k, point.z, lam) * env * sampler.eval_scaled(arg)
        total += np.sum(w / k * np.asarray(vals.to_complex(), dtype=complex)) / (2j * math.pi)
        if j == 2:
            extra = _symmetric_g_scaled(sampler, k, lam, side_length) / _delta_scaled(
                k, lam, side_length
            )
            vals = _ray_phase(k, point.z, lam) * env * extra
            total += (-2j) * np.sum(
                w / k * np.asarray(vals.to_complex(), dtype=complex)
            ) / (4.0 * math.pi)
        if j == 3:
            extra = _symmetric_g_conj_scaled(sampler, k, lam, side_length) / _delta_scaled(
                k, lam, side_length
            )
            vals = _ray_phase(k, point.z, lam) * env * extra
            total += (2j) * np.sum(
                w / k * np.asarray(vals.to_complex(), dtype=complex)
            ) / (4.0 * math.pi)

    # residue series over the mode roots s_n
    roots = dirichlet_mode_roots(lam, side_length, n_max)
    short = side_length / SQRT3  # E^2(w) = exp(mu(w) l / sqrt(3))
    res = 0.0 + 0.0j
    for root in roots:
        k = root.k
        g = _symmetric_g_scaled(sampler, k, lam, side_length)
        denom = (
            k
            * _delta_prime_scaled(k, lam, side_length)
            * _delta_scaled(ALPHA_BAR * k, lam, side_length)
        )
        phase = _ray_phase(k, point.z, lam)
        if root.plus:
            env = Scaled.from_exp(mu(1j * k, lam) * short)
        else:
            env = 0.5 * (
                Scaled.from_exp(mu(1j * ALPHA * k, lam) * short)
                + Scaled.from_exp(mu(1j * ALPHA_BAR * k, lam) * short)
            )
        term = phase * env * g / denom
        res += complex(np.ravel(np.asarray(term.to_complex()))[0])
    return float((total + res).real)


# -- separable eigensolutions ----------------------------------------------
def eigensolution(n: int, lam: float, sign: int, z, side_length: float = 1.0) -> complex:
    """Separable eigensolution exp{+-2 sqrt((n pi/l)^2 + lam) x - 2 i n pi y / l}.

    Equals exp{i s_n z + (lam/(i s_n)) zbar} for the mode root s_n on the
    branch selected by ``sign``.
    """
    rate = (n * math.pi / side_length) ** 2 + lam
    if rate < 0.0:
        raise DomainError("eigensolution requires (n pi / l)^2 + lam >= 0")
    x, y = z.real, z.imag
    growth = 2.0 * math.sqrt(rate) * x
    if sign >= 0:
        out = cmath.exp(growth - 2j * n * math.pi * y / side_length)
    else:
        out = cmath.exp(-growth - 2j * n * math.pi * y / side_length)
    return out


def eigensolution_mode_root(n: int, lam: float, sign: int, side_length: float = 1.0) -> complex:
    """The root s_n whose exponential exp{i s_n z + (lam/is_n) zbar}
    reproduces ``eigensolution(n, lam, sign, .)``."""
    if n == 0 and lam == 0.0:
        raise DomainError("the n = 0 mode root collapses to k = 0 for lam = 0")
    outer = quadratic_mode_root(2j * math.pi * n / side_length, lam)
    for s_n in (outer, lam / outer if outer != 0 else outer):
        yv = (s_n / 1j).real
        branch = 1 if -(yv + lam / yv) > 0 else -1
        if branch == (1 if sign >= 0 else -1):
            return s_n
    raise DomainError("no mode-root branch matches the requested sign")
