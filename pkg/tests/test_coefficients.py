import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import grid_coefficient, sympy_coefficient
from stochint.basis import BasisSystem, Interval, legendre, trigonometric
from stochint.coefficients import (ABSOLUTE, UNIT_INTERVAL, BudgetError, KernelSpec,
                                   TensorFormatError, build_tensor, coefficient, export_csv,
                                   load_tensor, read_header, save_tensor)


def leg(k, t=0.0, T=1.0, weights=None, p=4):
    iv = Interval(t, T)
    return build_tensor(KernelSpec(k, iv, weights), BasisSystem("legendre", iv), p)


class TestGoldenValues:
    @pytest.mark.parametrize("delta", [1.0, 0.25, 3.0])
    def test_simplex_entries(self, delta):
        for k, expected in [(1, math.sqrt(delta)), (2, delta / 2),
                            (3, delta**1.5 / 6), (5, delta**2.5 / 120)]:
            val = coefficient(KernelSpec(k, Interval(0, delta)), legendre(0, delta), (0,) * k)
            assert val == pytest.approx(expected, rel=1e-12)

    def test_first_off_diagonal_pair(self):
        t = leg(2, 0.0, 2.0)
        assert t[0, 1] == pytest.approx(2.0 / (2 * math.sqrt(3)), rel=1e-12)
        assert t[1, 0] == pytest.approx(-2.0 / (2 * math.sqrt(3)), rel=1e-12)

    def test_k2_band_structure(self):
        # only C_00 and the first off-diagonals survive, with 1/sqrt(4j^2 - 1) weights
        delta = 1.5
        t = leg(2, 0.0, delta, p=12).values
        expected = np.zeros((13, 13))
        expected[0, 0] = delta / 2
        for j in range(1, 13):
            expected[j - 1, j] = delta / 2 / math.sqrt(4 * j * j - 1)
            expected[j, j - 1] = -expected[j - 1, j]
        np.testing.assert_allclose(t, expected, atol=1e-14)

    def test_k1(self):
        np.testing.assert_allclose(leg(1, 0.0, 4.0, p=3).values, [2.0, 0, 0, 0], atol=1e-15)

    def test_k5_p2_size(self):
        t = leg(5, 0.0, 0.5, p=2)
        assert t.values.shape == (3,) * 5
        assert t[0, 0, 0, 0, 0] == pytest.approx(0.5**2.5 / 120, rel=1e-12)


class TestAgainstOracles:
    @pytest.mark.parametrize("js", [(1, 2), (3, 0), (2, 1, 0), (0, 1, 1), (1, 0, 2, 1),
                                    (2, 1, 1, 0, 1), (0, 0, 1, 2, 1)])
    def test_legendre_exact(self, js):
        delta = 0.7
        val = coefficient(KernelSpec(len(js), Interval(0, delta)), legendre(0, delta), js)
        assert val == pytest.approx(sympy_coefficient(js, delta=0.7), rel=1e-12, abs=1e-15)

    @pytest.mark.parametrize("js,w", [((1, 0), (1, 0)), ((2, 1), (0, 2)),
                                      ((0, 1, 2), (1, 1, 0)), ((1, 1, 0, 2), (0, 1, 0, 1))])
    def test_legendre_weighted_exact(self, js, w):
        val = coefficient(KernelSpec(len(js), Interval(0, 1), w), legendre(), js)
        assert val == pytest.approx(sympy_coefficient(js, w), rel=1e-12, abs=1e-15)

    def test_shifted_interval_weights(self):
        # psi(s) = (t - s) on [2, 3] behaves like -u on [0, 1]
        val = coefficient(KernelSpec(2, Interval(2, 3), (1, 0)), legendre(2, 3), (1, 0))
        assert val == pytest.approx(sympy_coefficient((1, 0), (1, 0)), rel=1e-12)

    @pytest.mark.parametrize("js", [(1, 2), (2, 1), (0, 3), (1, 3, 2), (2, 1, 1), (2, 1, 1, 2),
                                    (1, 0, 2, 1), (1, 2, 0, 2, 1), (4, 3, 2, 1, 0),
                                    (3, 1, 2, 0, 1)])
    def test_trigonometric_grid(self, js):
        delta = 2.0
        val = coefficient(KernelSpec(len(js), Interval(1, 1 + delta)),
                          trigonometric(1, 1 + delta), js)
        ref = grid_coefficient("trigonometric", js, delta=delta)
        assert abs(ref) > 1e-4
        assert val == pytest.approx(ref, rel=1e-9, abs=1e-12)

    def test_trigonometric_weighted_grid(self):
        js, w = (1, 2, 0), (1, 0, 2)
        val = coefficient(KernelSpec(3, Interval(0, 1), w), trigonometric(), js)
        assert val == pytest.approx(grid_coefficient("trigonometric", js, w), rel=1e-9)

    def test_tensor_matches_pointwise(self):
        spec = KernelSpec(3, Interval(0, 1))
        for kind in ("legendre", "trigonometric"):
            b = BasisSystem(kind, spec.interval)
            t = build_tensor(spec, b, 3)
            for js in [(0, 1, 2), (3, 3, 1), (2, 0, 0)]:
                assert t[js] == pytest.approx(coefficient(spec, b, js), abs=1e-15)


@given(k=st.integers(2, 5), kind=st.sampled_from(["legendre", "trigonometric"]),
       data=st.data())
def test_permutation_sum(k, kind, data):
    js = tuple(data.draw(st.lists(st.integers(0, 6), min_size=k, max_size=k)))
    spec = KernelSpec(k, Interval(0, 1.3))
    b = BasisSystem(kind, spec.interval)
    total = sum(coefficient(spec, b, perm) for perm in itertools.permutations(js))
    single = math.prod(coefficient(KernelSpec(1, spec.interval), b, (j,)) for j in js)
    assert abs(total - single) <= 1e-10


@given(k=st.integers(1, 4), t=st.floats(-3, 3), delta=st.floats(0.1, 5),
       kind=st.sampled_from(["legendre", "trigonometric"]))
def test_scaling_law(k, t, delta, kind):
    iv = Interval(t, t + delta)
    big = build_tensor(KernelSpec(k, iv), BasisSystem(kind, iv), 2)
    unit = build_tensor(KernelSpec(k, Interval(0, 1)), BasisSystem(kind, Interval(0, 1)), 2)
    np.testing.assert_allclose(big.values, unit.values * delta ** (k / 2), rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(big.renormalized(UNIT_INTERVAL).values, unit.values,
                               rtol=1e-12, atol=1e-15)


def test_antisymmetry_k2():
    t = leg(2, p=8)
    c1 = leg(1, p=8).values
    np.testing.assert_allclose(t.values + t.values.T, np.outer(c1, c1), atol=1e-15)


def test_parseval_monotone():
    t = leg(3, p=6)
    sums = [t.parseval_sum(p) for p in range(7)]
    assert all(b >= a for a, b in zip(sums, sums[1:]))
    assert sums[-1] <= 1 / 6


def test_budget_refusal():
    with pytest.raises(BudgetError, match="entries"):
        build_tensor(KernelSpec(5, Interval(0, 1)), legendre(), 30)


def test_build_is_deterministic():
    a = leg(4, p=5).values.tobytes()
    b = leg(4, p=5).values.tobytes()
    assert a == b


def test_values_read_only():
    t = leg(2)
    with pytest.raises(ValueError):
        t.values[0, 0] = 1.0


class TestPersistence:
    def test_round_trip(self, tmp_path):
        iv = Interval(0.5, 2.0)
        t = build_tensor(KernelSpec(3, iv, (0, 1, 0)), BasisSystem("trigonometric", iv), 3)
        path = save_tensor(t, tmp_path / "c.bin", run_config={"command": "coeffs"})
        back = load_tensor(path)
        assert back.values.tobytes() == t.values.tobytes()
        assert back.spec == t.spec and back.basis_kind == t.basis_kind and back.p == 3
        assert read_header(path)["run_config"] == {"command": "coeffs"}

    def test_layout_j1_fastest(self, tmp_path):
        t = leg(2, p=2)
        path = save_tensor(t, tmp_path / "c.bin")
        raw = path.read_bytes().split(b"\n", 1)[1]
        flat = np.frombuffer(raw, dtype="<f8")
        assert flat[1] == t[1, 0] and flat[3] == t[0, 1]

    def test_truncated_payload(self, tmp_path):
        path = save_tensor(leg(2, p=3), tmp_path / "c.bin")
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(TensorFormatError, match="size mismatch"):
            load_tensor(path)

    def _rewrite_header(self, path, **changes):
        head, payload = path.read_bytes().split(b"\n", 1)
        d = json.loads(head)
        d.update(changes)
        path.write_bytes(json.dumps(d).encode() + b"\n" + payload)

    def test_unsupported_multiplicity(self, tmp_path):
        path = save_tensor(leg(2, p=1), tmp_path / "c.bin")
        self._rewrite_header(path, k=6)
        with pytest.raises(TensorFormatError, match="unsupported multiplicity"):
            load_tensor(path)

    def test_unknown_schema(self, tmp_path):
        path = save_tensor(leg(2, p=1), tmp_path / "c.bin")
        self._rewrite_header(path, schema_version=99)
        with pytest.raises(TensorFormatError, match="schema version"):
            load_tensor(path)

    def test_corrupt_header(self, tmp_path):
        path = tmp_path / "c.bin"
        path.write_bytes(b"{not json\n" + b"\0" * 8)
        with pytest.raises(TensorFormatError, match="corrupt header"):
            load_tensor(path)

    def test_csv_export(self, tmp_path):
        t = leg(2, p=1)
        lines = export_csv(t, tmp_path / "c.csv").read_text().splitlines()
        assert lines[0] == "j_1,j_2,value"
        assert lines[2].startswith("1,0,") and float(lines[2].split(",")[2]) == t[1, 0]


def test_normalization_label():
    t = leg(2)
    assert t.normalization == ABSOLUTE
    assert t.renormalized(UNIT_INTERVAL).normalization == UNIT_INTERVAL
