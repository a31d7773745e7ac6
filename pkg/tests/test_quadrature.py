import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viscolimit.quadrature import IntegralTable, QuadratureError, adaptive_simpson


def test_simpson_is_exact_on_cubics():
    assert adaptive_simpson(lambda x: x**3, 0.0, 2.0) == pytest.approx(4.0, abs=1e-14)


def test_simpson_reaches_tolerance_on_sine():
    assert abs(adaptive_simpson(math.sin, 0.0, math.pi, tol=1e-10) - 2.0) < 1e-9


def test_simpson_orientation_and_empty_interval():
    assert adaptive_simpson(math.exp, 1.0, 0.0) == pytest.approx(-(math.e - 1.0), abs=1e-9)
    assert adaptive_simpson(math.exp, 0.3, 0.3) == 0.0


def test_simpson_depth_limit_raises():
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda x: 1.0 if x > 1 / 3 else 0.0, 0.0, 1.0, tol=1e-14, max_depth=5)


@settings(max_examples=40, deadline=None)
@given(
    a=st.floats(-2, 2),
    b=st.floats(-2, 2),
    c=st.floats(-2, 2),
    coeffs=st.lists(st.floats(-3, 3), min_size=1, max_size=6),
)
def test_simpson_is_additive(a, b, c, coeffs):
    p = np.polynomial.Polynomial(coeffs)
    f = lambda x: float(p(x))  # noqa: E731
    whole = adaptive_simpson(f, a, c)
    split = adaptive_simpson(f, a, b) + adaptive_simpson(f, b, c)
    assert abs(whole - split) < 1e-7


def test_integral_table_matches_antiderivative():
    table = IntegralTable(math.cos, -2.0, 2.0, 0.0, n=201)
    z = np.linspace(-2, 2, 1001)
    assert np.max(np.abs(table(z) - np.sin(z))) < 1e-9
    assert table(0.0) == 0.0


def test_integral_table_falls_back_outside_range():
    table = IntegralTable(lambda r: 2 * r, -1.0, 1.0, 0.0, n=51)
    assert float(table(np.array([1.5]))[0]) == pytest.approx(2.25, abs=1e-9)


def test_integral_table_resolves_breakpoints():
    s = 1e-3
    g = lambda r: r / math.sqrt(r * r + s * s)  # noqa: E731
    table = IntegralTable(g, -1.0, 1.0, 0.0, n=101, breakpoints=((0.0, s),))
    z = np.array([-0.7, -2e-3, 0.0, 5e-4, 0.4])
    exact = np.sqrt(z * z + s * s) - s
    assert np.max(np.abs(table(z) - exact)) < 1e-9


def test_integral_table_rejects_empty_range():
    with pytest.raises(ValueError):
        IntegralTable(math.cos, 1.0, 1.0, 1.0)
