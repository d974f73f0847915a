"""Boundary maps as exact Fourier series.

The solvable boundary-value problems on the equilateral triangle admit
Fourier series for the unknown boundary data whose coefficients are finite
combinations of spectral transforms of the given data, evaluated at the
roots of

    k + lambda/k = 2 pi i m / (3 l),      m integer

(the period-l problems use only m = 3n).  Three maps are provided:

* ``symmetric_dirichlet_dtn`` -- identical Dirichlet data on the three
  sides; the common Neumann trace is a period-l series.
* ``general_dirichlet_dtn`` -- arbitrary Dirichlet data; the three Neumann
  traces share one period-3l coefficient sequence M(k_m), distributed to
  the sides by cube-root-of-unity chain weights.
* ``neumann_to_dirichlet`` -- arbitrary Neumann data; same structure with
  coefficients N(k_m).

For the oblique Robin problem (common beta, gamma on all sides) the modes
move to transcendental points: ``robin_mode_root`` tracks them from the
gamma = 0 seeds and ``robin_moment`` returns the generalized moment of the
unknown Dirichlet traces at such a mode.

All coefficient formulas are assembled in exponent-carrying (``Scaled``)
arithmetic, since the individual e/E factors overflow double precision long
before the coefficient ratios do.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import ParameterError, ResonanceError, RootFindError, SolvabilityError
from .geometry import ALPHA, ALPHA_BAR, SQRT3, mu
from .scaledc import Scaled
from .quadrature import QuadratureRule
from .spectral import Kind, SideSampler
from .symbols import SideSymbol
from .traces import FourierSeriesTrace, sample_grid

#: relative threshold below which a mode denominator counts as resonant
RESONANCE_RTOL = 1e-10

#: chain weights (c1, c2) distributing M(k_{3n-1}), M(k_{3n-2}) to the sides
CHAIN_WEIGHTS = {1: (1.0, 1.0), 2: (ALPHA_BAR, ALPHA), 3: (ALPHA, ALPHA_BAR)}


def quadratic_mode_root(mu_value: complex, lam: float) -> complex:
    """The root of k + lambda/k = mu_value on the outer branch.

    Of the two roots (whose product is lambda) the one with larger modulus
    is returned, so |k| >= sqrt(lambda); ties are broken toward larger real
    part, then larger imaginary part.
    """
    disc = np.sqrt(complex(mu_value) ** 2 - 4.0 * lam + 0j)
    k1 = 0.5 * (mu_value + disc)
    k2 = 0.5 * (mu_value - disc)
    key = lambda k: (abs(k), k.real, k.imag)
    k = max(k1, k2, key=key)
    if k == 0:
        raise ParameterError("mode root degenerates to k = 0")
    return k


def _collapse(x: Scaled) -> complex:
    """Collapse a scalar-shaped Scaled value to a plain complex number."""
    return complex(np.ravel(np.asarray(x.to_complex()))[0])


def _e_scaled(k, lam, side_length) -> Scaled:
    """e(k) = exp(mu(k) l / 2) as a Scaled value."""
    return Scaled.from_exp(mu(k, lam) * (side_length / 2.0))


def _big_e_scaled(k, lam, side_length) -> Scaled:
    """E(k) = exp(mu(k) l / (2 sqrt(3))) as a Scaled value."""
    return Scaled.from_exp(mu(k, lam) * (side_length / (2.0 * SQRT3)))


def _finalize(side, side_length, modes, coeffs) -> FourierSeriesTrace:
    trace = FourierSeriesTrace(
        side=side,
        side_length=side_length,
        modes=np.asarray(modes, dtype=int),
        coeffs=np.asarray(coeffs, dtype=complex),
    )
    s = sample_grid(side_length, n=257, corner_margin=0.0)
    imbalance = float(np.max(np.abs(np.imag(trace.synthesis(s)))))
    return FourierSeriesTrace(
        side=side,
        side_length=side_length,
        modes=trace.modes,
        coeffs=trace.coeffs,
        imbalance=imbalance,
    )


def symmetric_dirichlet_dtn(
    data, lam: float, side_length: float, n_max: int = 64, order=None
) -> FourierSeriesTrace:
    """Neumann trace for identical Dirichlet data on all three sides.

    ``data`` is the common Dirichlet trace f(s) (must be continuous across
    the corners, f(-l/2) = f(l/2)).  Returns the common Neumann trace as a
    period-l Fourier series (modes are multiples of three in the shared
    period-3l labelling).
    """
    sampler = SideSampler(data, Kind.F_DIRICHLET, lam, side_length)
    half = side_length / 2.0
    modes, coeffs, resonant = [], [], []
    for n in range(-n_max, n_max + 1):
        if n == 0 and lam == 0.0:
            # the mean of the Neumann trace vanishes by the divergence theorem
            modes.append(0)
            coeffs.append(0.0)
            continue
        s_n = quadratic_mode_root(2j * np.pi * n / side_length, lam)
        w = mu(ALPHA_BAR * s_n, lam) * half
        sinh = 0.5 * (Scaled.from_exp(w) - Scaled.from_exp(-w))
        cosh = 0.5 * (Scaled.from_exp(w) + Scaled.from_exp(-w))
        if sinh.abs_log() < math.log(RESONANCE_RTOL) + abs(w.real):
            resonant.append(n)
            continue
        g = (
            2.0 * cosh * sampler.eval_scaled(s_n, order=order)
            + (2.0 * cmath.exp(1j * np.pi * n)) * sampler.eval_scaled(ALPHA_BAR * s_n, order=order)
            + 2.0 * sampler.eval_scaled(ALPHA * s_n, order=order)
        )
        modes.append(3 * n)
        coeffs.append(_collapse((1j / side_length) * g / sinh))
    if resonant:
        raise ResonanceError(
            "lambda sits at (or near) an interior Dirichlet eigenvalue", modes=resonant
        )
    return _finalize(1, side_length, modes, coeffs)


def _chain_traces(side_length, modes, m_coeffs):
    """Distribute the shared coefficient sequence to the three sides."""
    modes = np.asarray(modes, dtype=int)
    m_coeffs = np.asarray(m_coeffs, dtype=complex)
    out = []
    for side in (1, 2, 3):
        c1, c2 = CHAIN_WEIGHTS[side]
        weight = np.where(
            modes % 3 == 0, 1.0, np.where(modes % 3 == 2, c1, c2)
        ).astype(complex)
        out.append(
            _finalize(side, side_length, modes, weight * m_coeffs / (3.0 * side_length))
        )
    return tuple(out)


def _mode_denominator(m, k, lam, side_length):
    """alpha_bar^m e(alpha_bar k) - e(-alpha_bar k), Scaled, with resonance test."""
    e_plus = _e_scaled(ALPHA_BAR * k, lam, side_length)
    e_minus = _e_scaled(-ALPHA_BAR * k, lam, side_length)
    den = (ALPHA_BAR**m) * e_plus - e_minus
    scale = max(e_plus.abs_log(), e_minus.abs_log())
    return den, den.abs_log() < math.log(RESONANCE_RTOL) + scale


def general_dirichlet_dtn(
    data, lam: float, side_length: float, m_max: int = 96, order=None
):
    """Neumann traces for arbitrary Dirichlet data on the three sides.

    ``data`` is a triple of Dirichlet traces (f_1, f_2, f_3), continuous at
    the vertices.  Returns the three Neumann traces as period-3l Fourier
    series.
    """
    if len(data) != 3:
        raise ParameterError("expected one Dirichlet trace per side")
    f = [SideSampler(t, Kind.F_DIRICHLET, lam, side_length) for t in data]
    modes, m_coeffs, resonant = [], [], []
    for m in range(-m_max, m_max + 1):
        if m == 0 and lam == 0.0:
            # M(k_0) is the total Neumann flux, which vanishes at lambda = 0
            modes.append(0)
            m_coeffs.append(0.0)
            continue
        k = quadratic_mode_root(2j * np.pi * m / (3.0 * side_length), lam)
        den, is_resonant = _mode_denominator(m, k, lam, side_length)
        if is_resonant:
            resonant.append(m)
            continue
        a, ab = ALPHA * k, ALPHA_BAR * k
        ep = _e_scaled(k, lam, side_length)
        em = _e_scaled(-k, lam, side_length)
        ep_ab = _e_scaled(ab, lam, side_length)
        em_ab = _e_scaled(-ab, lam, side_length)
        f_at = lambda j, kk: f[j].eval_scaled(kk, order=order)
        x = (em * em * ep_ab + em_ab) * (f_at(0, k) + ep * ep * f_at(2, k))
        x = x + em * em * (em * em * ep_ab * ep**6 + em_ab) * f_at(1, k)
        x = x + 2.0 * ep * ep * f_at(0, a) + 2.0 * f_at(1, a) + 2.0 * em * em * f_at(2, a)
        x = x + em**3 * (
            2.0 * ep * ep * f_at(0, ab)
            + (ep**6 + 1.0) * f_at(1, ab)
            + 2.0 * em * em * ep**6 * f_at(2, ab)
        )
        modes.append(m)
        m_coeffs.append(_collapse(2j * x / den))
    if resonant:
        raise ResonanceError(
            "lambda sits at (or near) an interior Dirichlet eigenvalue", modes=resonant
        )
    return _chain_traces(side_length, modes, m_coeffs)


def neumann_to_dirichlet(
    data, lam: float, side_length: float, m_max: int = 96, order=None
):
    """Dirichlet traces for Neumann data on the three sides.

    ``data`` is a triple of Neumann traces (f_1, f_2, f_3).  At lambda = 0
    the data must satisfy the zero-total-flux compatibility condition and
    the result is gauged to zero mean over the whole boundary.
    """
    if len(data) != 3:
        raise ParameterError("expected one Neumann trace per side")
    f = [
        SideSampler(t, Kind.F_ROBIN, lam, side_length, beta=np.pi / 2.0) for t in data
    ]
    if lam == 0.0:
        rule = QuadratureRule.side(side_length, 128)
        vals = [
            np.broadcast_to(
                np.asarray(t.value(rule.nodes), dtype=float), rule.nodes.shape
            )
            for t in data
        ]
        total = sum(rule.integrate(v) for v in vals)
        scale = max(np.max(np.abs(v)) for v in vals)
        if abs(total) > 1e-8 * max(1.0, scale * side_length):
            raise SolvabilityError(
                "lambda = 0 Neumann data violates the zero-total-flux condition"
            )
    modes, n_coeffs, resonant = [], [], []
    for m in range(-m_max, m_max + 1):
        if m == 0 and lam == 0.0:
            # the boundary mean of q is a free constant; gauge it to zero
            modes.append(0)
            n_coeffs.append(0.0)
            continue
        k = quadratic_mode_root(2j * np.pi * m / (3.0 * side_length), lam)
        den, is_resonant = _mode_denominator(m, k, lam, side_length)
        if is_resonant:
            resonant.append(m)
            continue
        a, ab = ALPHA * k, ALPHA_BAR * k
        ep = _e_scaled(k, lam, side_length)
        em = _e_scaled(-k, lam, side_length)
        e3a_m = _big_e_scaled(-1j * a, lam, side_length) ** 3
        e3a_p = _big_e_scaled(1j * a, lam, side_length) ** 3
        e3ab_m = _big_e_scaled(-1j * ab, lam, side_length) ** 3
        e3ab_p = _big_e_scaled(1j * ab, lam, side_length) ** 3
        f_at = lambda j, kk: f[j].eval_scaled(kk, order=order)
        rhs = em * (e3a_m + e3a_p) * f_at(0, k)
        rhs = rhs + (e3ab_m + e3ab_p) * f_at(1, k)
        rhs = rhs + ep * (e3a_m + e3a_p) * f_at(2, k)
        rhs = rhs + 2.0 * ep * ep * f_at(0, a) + 2.0 * f_at(1, a) + 2.0 * em * em * f_at(2, a)
        rhs = rhs + 2.0 * em * f_at(0, ab) + (ep**3 + em**3) * f_at(1, ab) + 2.0 * ep * f_at(2, ab)
        t_n = -1.0 * rhs / mu(1j * k, lam)
        modes.append(m)
        n_coeffs.append(_collapse(2.0 * t_n / den))
    if resonant:
        raise ResonanceError(
            "lambda sits at (or near) an interior Neumann eigenvalue", modes=resonant
        )
    return _chain_traces(side_length, modes, n_coeffs)


# -- oblique Robin modes ---------------------------------------------------
def robin_mode_root(
    m: int,
    lam: float,
    side_length: float,
    beta: float,
    gamma: float,
    steps: int = 24,
    tol: float = 1e-13,
) -> complex:
    """Root of e^2(k) P(alpha k)/P(alpha_bar k) = exp(2 pi i m / 3).

    Tracked by continuation in gamma from the closed-form gamma = 0 seed
    (where P is constant and the condition reduces to mu = 2 pi i m/(3l)),
    with analytic-derivative Newton refinement at every step.
    """
    if m == 0 and lam == 0.0:
        raise ParameterError("m = 0 mode degenerates at lambda = 0")
    k = quadratic_mode_root(2j * np.pi * m / (3.0 * side_length), lam)
    target = cmath.exp(2j * np.pi * m / 3.0)
    ell = side_length
    for g in np.linspace(0.0, gamma, steps + 1)[1:] if gamma != 0.0 else (0.0,):
        sym = SideSymbol(lam, beta, float(g))

        def value_and_deriv(kk):
            a, ab = ALPHA * kk, ALPHA_BAR * kk
            e2 = cmath.exp(mu(kk, lam) * ell)
            pa, pab = sym.p(a), sym.p(ab)
            val = e2 * pa / pab - target
            logderiv = (
                ell * (1.0 - lam / (kk * kk))
                + ALPHA * sym.dp(a) / pa
                - ALPHA_BAR * sym.dp(ab) / pab
            )
            return val, (val + target) * logderiv

        converged = False
        for _ in range(80):
            val, dv = value_and_deriv(k)
            step = val / dv
            k = k - step
            if abs(step) < tol * max(1.0, abs(k)):
                converged = True
                break
        if not converged:
            raise RootFindError(f"Robin mode root m={m} failed to converge")
    return k


def oblique_robin_t(k, f_samplers, lam: float, side_length: float, beta: float, gamma: float):
    """The known forcing T(k) of the oblique Robin elimination, Scaled.

    ``f_samplers`` are the three F_ROBIN samplers of the Poincare data; beta
    and gamma must be shared by the three sides.
    """
    sym = SideSymbol(lam, beta, gamma)
    a, ab = ALPHA * k, ALPHA_BAR * k
    pa, pab = sym.p(a), sym.p(ab)
    ep = _e_scaled(k, lam, side_length)
    em = _e_scaled(-k, lam, side_length)
    e3 = lambda kk: _big_e_scaled(kk, lam, side_length) ** 3
    f_at = lambda j, kk: f_samplers[j].eval_scaled(kk)
    combo = em * (e3(-1j * a) - (pab / pa**2) * e3(1j * a)) * f_at(0, k)
    combo = combo + ((pab / pa) * e3(-1j * ab) - (1.0 / pab) * e3(1j * ab)) * f_at(1, k)
    combo = combo + ep * ((pa / pab) * e3(-1j * a) - (1.0 / pa) * e3(1j * a)) * f_at(2, k)
    combo = combo + ((pa - 1.0) / pab) * ep * ep * f_at(0, a)
    combo = combo + ((pa - 1.0) / pa) * f_at(1, a)
    combo = combo + (pab * (pa - 1.0) / pa**2) * em * em * f_at(2, a)
    combo = combo + ((pab - 1.0) / pa) * em * f_at(0, ab)
    combo = combo + ((pa / pab) * ep**3 - (pab / pa**2) * em**3) * f_at(1, ab)
    combo = combo + ((pab - 1.0) / pab) * ep * f_at(2, ab)
    return combo / sym.hbar(k)


def robin_moment(
    m: int,
    data,
    lam: float,
    side_length: float,
    beta: float,
    gamma: float,
    order=None,
):
    """Generalized moment of the Dirichlet traces at a Robin mode.

    Returns (k_m, G) with

        int e^{mu(k_m) s} [q1 + w^{-1} q2 + w q3] ds = G,   w = e^{2 pi i m/3},

    where the q_j are the unknown Dirichlet traces of the oblique Robin
    problem with common (beta, gamma) and data triple ``data``.
    """
    if len(data) != 3:
        raise ParameterError("expected one data trace per side")
    if math.sin(beta) == 0.0:
        raise ParameterError("sin(beta) must be nonzero")
    k = robin_mode_root(m, lam, side_length, beta, gamma)
    sym = SideSymbol(lam, beta, gamma)
    f = [
        SideSampler(t, Kind.F_ROBIN, lam, side_length, beta=beta) for t in data
    ]
    t_val = oblique_robin_t(k, f, lam, side_length, beta, gamma)
    den = (ALPHA_BAR**m) * (sym.p(k) / sym.p(ALPHA * k)) * _e_scaled(
        ALPHA_BAR * k, lam, side_length
    ) - _e_scaled(-ALPHA_BAR * k, lam, side_length)
    return k, _collapse(2.0 * math.sin(beta) * t_val / den)