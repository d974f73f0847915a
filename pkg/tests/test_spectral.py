import cmath
import math

import numpy as np
import pytest

from tridtn.errors import DomainError, ParameterError
from tridtn.geometry import mu
from tridtn.spectral import MU_INVARIANT_KINDS, Kind, SideSampler, spectral_transform
from tridtn.traces import BoundaryTrace, FourierSeriesTrace


def exp_trace(c, side=1):
    return BoundaryTrace(
        side=side,
        value=lambda s: np.exp(c * np.asarray(s)),
        derivative=lambda s: c * np.exp(c * np.asarray(s)),
    )


def closed_psi(k, lam, c, half=0.5):
    rate = mu(k, lam) + c
    return (np.exp(rate * half) - np.exp(-rate * half)) / rate


@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_psi_matches_closed_form(lam, rng):
    c = 0.7
    sampler = SideSampler(exp_trace(c), Kind.PSI, lam, 1.0)
    for _ in range(20):
        k = rng.uniform(0.2, 4.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        want = closed_psi(k, lam, c)
        got = sampler.eval(k)
        assert abs(got - want) < 1e-12 * max(1.0, abs(want))


def test_phi_matches_closed_form(rng):
    c, lam = 0.4, 1.3
    sampler = SideSampler(exp_trace(c), Kind.PHI, lam, 1.0)
    for _ in range(20):
        k = rng.uniform(0.2, 4.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        want = (0.5 * c + lam / k) * closed_psi(k, lam, c)
        assert abs(sampler.eval(k) - want) < 1e-12 * max(1.0, abs(want))


def test_f_robin_scaling(rng):
    beta = 0.9
    sampler = SideSampler(exp_trace(0.3), Kind.F_ROBIN, 1.0, 1.0, beta=beta)
    plain = SideSampler(exp_trace(0.3), Kind.PSI, 1.0, 1.0)
    k = 1.1 + 0.7j
    assert abs(sampler.eval(k) - plain.eval(k) / (2.0 * math.sin(beta))) < 1e-13


def test_mu_inversion_invariance(rng):
    lam = 1.7
    trace = exp_trace(0.5)
    for kind in MU_INVARIANT_KINDS:
        beta = 1.0 if kind in (Kind.F_ROBIN, Kind.Y) else None
        sampler = SideSampler(trace, kind, lam, 1.0, beta=beta)
        for _ in range(10):
            k = rng.uniform(0.3, 3.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            a, b = sampler.eval(k), sampler.eval(lam / k)
            assert abs(a - b) < 1e-11 * max(1.0, abs(a))


def test_eval_scaled_consistency(rng):
    sampler = SideSampler(exp_trace(0.2), Kind.PSI, 1.0, 1.0)
    for _ in range(10):
        k = rng.uniform(0.3, 3.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        plain = sampler.eval(k)
        scaled = complex(np.ravel(np.asarray(sampler.eval_scaled(k).to_complex()))[0])
        assert abs(plain - scaled) < 1e-12 * max(1.0, abs(plain))


def test_large_mu_layer_path():
    # the boundary-layer windows must agree with an explicit high-order rule
    c, lam = 0.3, 1.0
    sampler = SideSampler(exp_trace(c), Kind.PSI, lam, 1.0)
    k = 400.0 + 3.0j
    got = sampler.eval_scaled(k)
    rate = mu(k, lam) + c
    # exact: e^{rate/2}/rate to exponential accuracy; compare in log space
    want_log = (rate * 0.5).real - math.log(abs(rate))
    got_log = got.abs_log()
    assert abs(got_log - want_log) < 1e-10 * max(1.0, abs(want_log))


def test_k_zero_rejected():
    sampler = SideSampler(exp_trace(0.1), Kind.PSI, 1.0, 1.0)
    with pytest.raises(DomainError):
        sampler.eval(0.0)


def test_beta_required():
    with pytest.raises(ParameterError):
        SideSampler(exp_trace(0.1), Kind.F_ROBIN, 1.0, 1.0)
    with pytest.raises(ParameterError):
        SideSampler(exp_trace(0.1), Kind.Y, 1.0, 1.0, beta=0.0)


def test_fourier_trace_quadrature_hint():
    # a high-mode series must be resolved automatically by the transform
    m = 90  # 30 oscillations per side
    trace = FourierSeriesTrace(
        side=1, side_length=1.0, modes=np.array([m, -m]), coeffs=np.array([0.5, 0.5])
    )
    assert trace.quadrature_hint >= 2 * m / 3
    sampler = SideSampler(trace, Kind.PSI, 1.0, 1.0)
    k = 0.9 + 0.4j
    auto = sampler.eval(k)
    brute = sampler.eval(k, order=1024)
    assert abs(auto - brute) < 1e-11 * max(1.0, abs(brute))


def test_spectral_transform_wrapper():
    c, lam = 0.25, 0.8
    trace = exp_trace(c)
    k = 1.2 - 0.3j
    got = spectral_transform(trace, Kind.PSI, k, lam, 1.0)
    assert abs(got - closed_psi(k, lam, c)) < 1e-12
