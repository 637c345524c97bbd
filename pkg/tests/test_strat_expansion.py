import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stochint.basis import Interval, legendre
from stochint.coefficients import KernelSpec, build_tensor
from stochint.gaussians import GaussianMatrix, draw
from stochint.ito_expansion import ItoTruncation, eval_ito
from stochint.strat_expansion import (StratTruncation, UncoveredExpansionWarning, eval_strat,
                                      validity_conditions)


def tensor(k, p, T=1.0, weights=None):
    iv = Interval(0, T)
    return build_tensor(KernelSpec(k, iv, weights), legendre(0, T), p)


def test_k2_p0():
    z = 1.3
    trunc = StratTruncation(tensor(2, 0), (1, 1), 0)
    g = GaussianMatrix([[1.0], [z]], legendre())
    assert eval_strat(trunc, g) == pytest.approx(z * z / 2, rel=1e-15)


@pytest.mark.parametrize("T", [1.0, 0.3, 2.0])
def test_lowest_order_correction(T):
    t = tensor(2, 0, T)
    g = draw(5, 1, 0, legendre(0, T))
    gap = eval_strat(StratTruncation(t, (1, 1), 0), g) - eval_ito(ItoTruncation(t, (1, 1), 0), g)
    assert gap == pytest.approx(T / 2, rel=1e-14)


def test_zero_inputs():
    trunc = StratTruncation(tensor(3, 2), (1, 2, 1), 2)
    g = GaussianMatrix(np.zeros((3, 3)), legendre())
    assert eval_strat(trunc, g) == 0.0


@given(seed=st.integers(0, 10**6), c=st.floats(-3, 3))
def test_multilinear_in_rows(seed, c):
    t = tensor(3, 2)
    trunc = StratTruncation(t, (1, 2, 1), 2)
    g = draw(seed, 2, 2, legendre())
    base = eval_strat(trunc, g)
    assert eval_strat(trunc, g.with_row(1, c * g.values[1])) == pytest.approx(c * c * base, abs=1e-12)
    assert eval_strat(trunc, g.with_row(2, c * g.values[2])) == pytest.approx(c * base, abs=1e-12)


class TestValidity:
    def test_k3_repeated(self):
        rep = validity_conditions(3, (1, 1, 2), (0, 0, 0))
        assert rep.covered
        assert "triple integral, smooth weights: i1 = i2 != i3, psi1 = psi2" in rep.results
        assert "triple integral, smooth weights, nonzero indices" in rep.results

    def test_k3_weighted(self):
        rep = validity_conditions(3, (1, 2, 2), (1, 2, 2))
        assert "triple Legendre, monomial weights: i1 != i2 = i3, l1 != l2 = l3" in rep.results

    @pytest.mark.parametrize("noise", [(1, 1, 1, 1, 1), (0, 1, 0, 2, 3), (1, 2, 3, 4, 5)])
    def test_k5(self, noise):
        assert validity_conditions(5, noise).results == ("fivefold integral, unit weights",)

    def test_uncovered_warns_but_evaluates(self):
        rep = validity_conditions(4, (1, 1, 2, 2), (1, 0, 0, 0))
        assert not rep.covered and "not covered" in str(rep)
        trunc = StratTruncation(tensor(4, 1, weights=(1, 0, 0, 0)), (1, 1, 2, 2), 1)
        with pytest.warns(UncoveredExpansionWarning):
            val = eval_strat(trunc, draw(0, 2, 1, legendre()))
        assert np.isfinite(val)

    def test_covered_is_silent(self):
        trunc = StratTruncation(tensor(2, 1), (1, 1), 1)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            eval_strat(trunc, draw(0, 1, 1, legendre()))

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            validity_conditions(6, (1,) * 6)
        with pytest.raises(ValueError):
            validity_conditions(2, (1, 2, 3))


@given(k=st.integers(1, 4), p=st.integers(0, 4), seed=st.integers(0, 10**6))
def test_all_equal_indices_give_power_of_endpoint(k, p, seed):
    # symmetrizing the product series leaves (int phi_0 * zeta_0)^k / k! = w^k / k!
    T = 0.7
    g = draw(seed, 1, p, legendre(0, T))
    w = T**0.5 * g(1, 0)
    val = eval_strat(StratTruncation(tensor(k, p, T), (1,) * k, p), g)
    assert val == pytest.approx(w**k / math.factorial(k), rel=1e-10, abs=1e-13)
