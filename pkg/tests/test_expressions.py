import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tridtn.errors import ExpressionError
from tridtn.expressions import expression_trace, parse_expression


def ev(text, s=0.0, l=1.0):
    return parse_expression(text)(s, l)


def test_reference_values():
    assert abs(ev("sin(2*pi*s/l)", s=0.25, l=1.0) - 1.0) < 1e-15
    assert abs(ev("s^2 - 3", s=2.0) - 1.0) < 1e-15
    node = parse_expression("exp(s)*cos(s)").diff()
    assert abs(node(0.0, 1.0) - 1.0) < 1e-15


def test_precedence_and_associativity():
    assert ev("-s^2", s=3.0) == -9.0          # unary minus binds looser than ^
    assert ev("2^3^2") == 512.0               # right-associative power
    assert ev("2+3*4") == 14.0
    assert ev("(2+3)*4") == 20.0
    assert ev("2-3-4") == -5.0                # left-associative subtraction
    assert ev("8/4/2") == 1.0


def test_symbols_and_functions():
    assert abs(ev("pi") - math.pi) < 1e-15
    assert ev("l", l=2.5) == 2.5
    assert abs(ev("cosh(s)^2 - sinh(s)^2", s=0.7) - 1.0) < 1e-12


def test_errors_carry_offsets():
    with pytest.raises(ExpressionError) as err:
        parse_expression("sin(s")
    assert err.value.offset == 5
    with pytest.raises(ExpressionError) as err:
        parse_expression("s + @")
    assert err.value.offset == 4
    with pytest.raises(ExpressionError):
        parse_expression("notafunc(s)")
    with pytest.raises(ExpressionError):
        parse_expression("")
    with pytest.raises(ExpressionError):
        parse_expression("1 2")


def test_power_derivative_needs_constant_exponent():
    node = parse_expression("s^3").diff()
    assert abs(node(2.0, 1.0) - 12.0) < 1e-12
    with pytest.raises(ExpressionError):
        parse_expression("2^s").diff()


@given(
    s=st.floats(-0.5, 0.5),
    text=st.sampled_from(
        [
            "sin(2*pi*s/l)",
            "cos(s)^2",
            "exp(s) * sinh(s)",
            "s^3 - 2*s + 1",
            "cosh(2*s) / (1 + s^2)",
            "-sin(s) + pi*s",
        ]
    ),
)
def test_symbolic_derivative_matches_central_difference(s, text):
    node = parse_expression(text)
    d = node.diff()
    h = 1e-6
    fd = (node(s + h, 1.0) - node(s - h, 1.0)) / (2.0 * h)
    assert abs(d(s, 1.0) - fd) < 1e-5 * max(1.0, abs(fd))


@given(
    text=st.sampled_from(
        [
            "sin(2*pi*s/l)",
            "-s^2 + 3*s",
            "exp(s)*cos(s) - 1/(2+s)",
            "2^3^2 + s",
        ]
    )
)
def test_pretty_round_trip(text):
    node = parse_expression(text)
    again = parse_expression(node.pretty())
    for s in (-0.4, 0.0, 0.3):
        assert abs(node(s, 1.0) - again(s, 1.0)) < 1e-12


def test_expression_trace_vectorised():
    trace = expression_trace("cos(2*pi*s/l)", 1, 1.0)
    s = np.linspace(-0.5, 0.5, 11)
    vals = trace(s)
    assert vals.shape == s.shape
    assert np.max(np.abs(vals - np.cos(2 * np.pi * s))) < 1e-14
    d = trace.d(s)
    assert np.max(np.abs(d + 2 * np.pi * np.sin(2 * np.pi * s))) < 1e-12
