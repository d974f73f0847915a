import numpy as np
import pytest
from hypothesis import given, strategies as st

from tridtn.scaledc import Scaled

moderate = st.complex_numbers(
    min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False
)


@given(a=moderate, b=moderate)
def test_arithmetic_matches_complex(a, b):
    sa, sb = Scaled.of(a), Scaled.of(b)
    assert abs(complex((sa * sb).to_complex()) - a * b) <= 1e-9 * abs(a * b)
    assert abs(complex((sa + sb).to_complex()) - (a + b)) <= 1e-9 * max(abs(a + b), 1e-12)
    assert abs(complex((sa - sb).to_complex()) - (a - b)) <= 1e-9 * max(abs(a - b), 1e-12)
    assert abs(complex((sa / sb).to_complex()) - a / b) <= 1e-9 * abs(a / b)


@given(w=st.complex_numbers(max_magnitude=200.0, allow_nan=False, allow_infinity=False))
def test_from_exp_consistency(w):
    got = Scaled.from_exp(w)
    assert abs(got.abs_log() - w.real) < 1e-9 * max(1.0, abs(w.real))


def test_huge_exponent_ratios():
    # exp(1000) / exp(999) = e, far beyond double range for the factors
    big = Scaled.from_exp(1000.0 + 0.3j)
    slightly_smaller = Scaled.from_exp(999.0 + 0.3j)
    assert abs(complex((big / slightly_smaller).to_complex()) - np.e) < 1e-12
    with pytest.raises(OverflowError):
        big.to_complex()


def test_cancellation_in_sums():
    a = Scaled.from_exp(500.0)
    b = -Scaled.from_exp(500.0)
    assert abs((a + b).abs_log()) == np.inf  # exact zero -> log|0| = -inf


def test_power_and_neg():
    x = Scaled.from_exp(3.0 + 1.0j)
    cubed = x**3
    assert abs(cubed.abs_log() - 9.0) < 1e-12
    assert abs(complex((-x).to_complex()) + complex(x.to_complex())) < 1e-12


def test_array_broadcasting():
    w = np.array([1.0 + 0.5j, -2.0, 0.0 + 1j])
    x = Scaled.from_exp(w)
    y = x * Scaled.of(2.0)
    vals = np.asarray(y.to_complex())
    assert np.max(np.abs(vals - 2.0 * np.exp(w))) < 1e-12
