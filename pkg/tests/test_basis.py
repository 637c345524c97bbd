import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from stochint.basis import (BasisDomainError, BasisSystem, Interval, legendre, trigonometric,
                            trig_frequency)


def test_interval_rejects_degenerate():
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)
    with pytest.raises(ValueError):
        Interval(0.0, math.inf)


def test_legendre_point_values():
    b = legendre()
    assert b.eval(0, 0.37) == pytest.approx(1.0, abs=1e-15)
    assert b.eval(1, 0.0) == pytest.approx(-math.sqrt(3), rel=1e-15)
    assert b.eval(2, 0.5) == pytest.approx(-math.sqrt(5) / 2, rel=1e-15)
    b2 = legendre(1.0, 3.0)
    assert b2.eval(2, 2.0) == pytest.approx(-math.sqrt(5 / 2) / 2, rel=1e-15)


def test_legendre_matches_scipy_to_high_order():
    b = legendre(-0.5, 1.5)
    x = np.linspace(-0.5, 1.5, 101)
    y = 2 * (x + 0.5) / 2.0 - 1
    tab = b.table(60, x)
    for j in (0, 7, 31, 60):
        ref = math.sqrt((2 * j + 1) / 2.0) * special.eval_legendre(j, y)
        np.testing.assert_allclose(tab[j], ref, rtol=1e-11, atol=1e-11)


def test_trig_ordering():
    b = trigonometric(0.0, 2.0)
    x = 0.3
    assert b.eval(0, x) == pytest.approx(1 / math.sqrt(2))
    assert b.eval(1, x) == pytest.approx(math.sin(math.pi * x))
    assert b.eval(2, x) == pytest.approx(math.cos(math.pi * x))
    assert b.eval(5, x) == pytest.approx(math.sin(3 * math.pi * x))
    assert [trig_frequency(j) for j in range(6)] == [0, 1, 1, 2, 2, 3]


def test_domain_tolerance():
    b = legendre(0.0, 1.0)
    assert b.eval(1, 1.0 + 1e-14) == pytest.approx(math.sqrt(3))
    with pytest.raises(BasisDomainError):
        b.eval(1, 1.0 + 1e-9)
    with pytest.raises(BasisDomainError):
        b.antiderivative(0, -0.1)


def test_antiderivative_examples():
    b = legendre()
    assert b.antiderivative(0, 1.0) == pytest.approx(1.0, abs=1e-15)
    for j in range(1, 10):
        assert abs(b.antiderivative(j, 1.0)) < 1e-14
    assert b.antiderivative(1, 0.5) == pytest.approx(-math.sqrt(3) / 4, rel=1e-14)


@pytest.mark.parametrize("kind", ["legendre", "trigonometric"])
@pytest.mark.parametrize("j", [0, 1, 2, 5, 12])
def test_antiderivative_matches_quadrature(kind, j):
    b = BasisSystem(kind, Interval(0.5, 2.0))
    for s in (0.7, 1.3, 2.0):
        ref, _ = integrate.fixed_quad(lambda x: b.table(j, x)[j], 0.5, s, n=60)
        assert b.antiderivative(j, s) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("kind,tol", [("legendre", 1e-12), ("trigonometric", 1e-10)])
def test_inner_product_examples(kind, tol):
    b = BasisSystem(kind, Interval(0.0, 3.0))
    assert abs(b.inner_product(3, 3) - 1) <= tol
    assert abs(b.inner_product(2, 5)) <= tol
    assert abs(b.inner_product(0, 0) - 1) <= tol


def test_trig_inner_product_against_quadrature():
    b = trigonometric(0.0, 1.0)
    for i, j in [(1, 1), (2, 4), (3, 4), (0, 7), (6, 6)]:
        ref, _ = integrate.quad(lambda x: b.eval(i, x) * b.eval(j, x), 0, 1, limit=200)
        assert b.inner_product(i, j) == pytest.approx(ref, abs=1e-10)


@given(kind=st.sampled_from(["legendre", "trigonometric"]),
       t=st.floats(-5, 5), delta=st.floats(0.05, 10), u=st.floats(0, 1),
       j=st.integers(0, 20))
def test_scaling_from_unit_interval(kind, t, delta, u, j):
    b = BasisSystem(kind, Interval(t, t + delta))
    unit = BasisSystem(kind, Interval(0.0, 1.0))
    x = min(t + u * delta, t + delta)
    assert b.eval(j, x) == pytest.approx(unit.eval(j, u) / math.sqrt(delta), rel=1e-9, abs=1e-9)


@given(kind=st.sampled_from(["legendre", "trigonometric"]), u=st.floats(0.001, 1.0))
def test_bessel_partial_sums(kind, u):
    b = BasisSystem(kind, Interval(0.0, 2.0))
    s = 2.0 * u
    sums = np.cumsum(b.antiderivative_table(40, s) ** 2)
    assert np.all(np.diff(sums) >= -1e-15)
    assert sums[-1] <= s + 1e-12
