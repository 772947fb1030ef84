import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiergap import sl2
from hiergap.sl2 import (
    IDENTITY,
    TransferMatrix,
    lemma_entry_check,
    non_closure_counterexample,
    pendulum_matrix,
    power_t2,
    power_tm2,
    product,
    t_matrix,
    theorem_margin,
)


def list_product(ts):
    """Oracle: plain nested-list matrix products, site 1 applied first."""
    p = [[1, 0], [0, 1]]
    for t in ts:
        m = [[0, -1], [1, t]]
        p = [[sum(m[i][k] * p[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    return p


def as_rows(m: TransferMatrix):
    return [list(r) for r in m.rows]


big_t = st.floats(min_value=2 + 1e-6, max_value=1e3) | st.floats(min_value=-1e3, max_value=-2 - 1e-6)
any_t = st.floats(min_value=-5, max_value=5)


class TestTMatrix:
    def test_t2(self):
        assert as_rows(t_matrix(2)) == [[0, -1], [1, 2]]

    def test_t0_trace(self):
        m = t_matrix(0)
        assert as_rows(m) == [[0, -1], [1, 0]]
        assert m.trace == 0

    def test_t3(self):
        m = t_matrix(3)
        assert m.trace == 3 and m.det == 1

    @pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
    def test_non_finite(self, bad):
        with pytest.raises(ValueError):
            t_matrix(bad)

    def test_non_number(self):
        with pytest.raises(TypeError):
            t_matrix("3")


class TestProduct:
    def test_empty_is_identity(self):
        assert product([]) == IDENTITY
        assert product([]).trace == 2

    def test_t2_squared(self):
        assert as_rows(product([t_matrix(2), t_matrix(2)])) == [[-1, -2], [2, 3]]

    def test_t3_squared(self):
        p = product([t_matrix(3), t_matrix(3)])
        assert as_rows(p) == [[-1, -3], [3, 8]]
        assert p.trace == 7

    def test_order_site_one_first(self):
        # T(-4) @ T(3): the first listed site acts first on the state vector
        assert as_rows(product([t_matrix(3), t_matrix(-4)])) == [[-1, -3], [-4, -13]]

    @given(st.lists(st.integers(-50, 50), max_size=20))
    def test_matches_list_oracle_exactly(self, ts):
        assert as_rows(product(t_matrix(t) for t in ts)) == list_product(ts)


class TestClosedForms:
    def test_t2_base(self):
        assert power_t2(1) == t_matrix(2)

    def test_t2_n2(self):
        assert as_rows(power_t2(2)) == [[-1, -2], [2, 3]]

    def test_t2_n7(self):
        assert power_t2(7) == product([t_matrix(2)] * 7)

    def test_tm2_base(self):
        assert power_tm2(1) == t_matrix(-2)
        assert power_tm2(1).trace == -2

    def test_tm2_n2(self):
        assert as_rows(power_tm2(2)) == list_product([-2, -2])

    def test_tm2_n6_trace(self):
        assert power_tm2(6).trace == 2
        assert power_tm2(6) == product([t_matrix(-2)] * 6)

    @pytest.mark.parametrize("n", range(1, 65))
    def test_exact_against_oracle(self, n):
        assert as_rows(power_t2(n)) == list_product([2] * n)
        assert as_rows(power_tm2(n)) == list_product([-2] * n)
        assert power_t2(n).trace == 2
        assert power_tm2(n).trace == (2 if n % 2 == 0 else -2)

    @pytest.mark.parametrize("f", [power_t2, power_tm2])
    def test_zero_rejected(self, f):
        with pytest.raises(ValueError):
            f(0)


class TestEntryBounds:
    def test_single_site(self):
        assert lemma_entry_check([3]) is True

    def test_two_sites(self):
        # product [[-1, -3], [-4, -13]]: 13 > 3 + 1 and 13 > 4 + 1
        assert lemma_entry_check([3, -4]) is True

    @pytest.mark.parametrize("ts", [[2.0], [3, -2], [1.5, 4]])
    def test_boundary_rejected(self, ts):
        with pytest.raises(ValueError):
            lemma_entry_check(ts)

    def test_empty(self):
        with pytest.raises(ValueError):
            lemma_entry_check([])

    @settings(max_examples=300)
    @given(st.lists(big_t, min_size=1, max_size=50))
    def test_holds_for_random_sequences(self, ts):
        assert lemma_entry_check(ts)


class TestTraceClosure:
    def test_t3_t3(self):
        v = theorem_margin([3, 3])
        assert v.trace == 7 and v.in_M and v.margin == 5

    def test_alternating(self):
        # exact oracle trace of T(5/2) T(-5/2) T(5/2) is -145/8
        v = theorem_margin([Fraction(5, 2), Fraction(-5, 2), Fraction(5, 2)])
        assert v.trace == Fraction(-145, 8)
        assert v.in_M
        fv = theorem_margin([2.5, -2.5, 2.5])
        assert fv.trace == pytest.approx(-145 / 8, rel=1e-15)

    def test_inside_band(self):
        v = theorem_margin([1])
        assert v.trace == 1 and not v.in_M

    def test_empty(self):
        with pytest.raises(ValueError):
            theorem_margin([])

    @settings(max_examples=300)
    @given(st.lists(big_t, min_size=1, max_size=50))
    def test_in_m_whenever_all_outside(self, ts):
        v = theorem_margin(ts)
        assert v.in_M and v.margin > 0

    @given(st.floats(-10, 10))
    def test_verdict_invariant(self, t):
        v = theorem_margin([t, 1.0])
        assert v.in_M == (v.margin > 0)


class TestNonClosure:
    def test_pair(self):
        a, b, v = non_closure_counterexample()
        assert a.trace == Fraction(10, 3)
        assert b.trace == 3
        assert v.trace == 1 and not v.in_M
        assert a.det == 1 and b.det == 1 and (a @ b).det == 1
        assert sl2.trace_verdict(a).in_M and sl2.trace_verdict(b).in_M


@settings(max_examples=200)
@given(st.lists(any_t, min_size=1, max_size=64))
def test_determinant_preserved(ts):
    p = product(t_matrix(t) for t in ts)
    scale = max(1.0, max(abs(x) for x in (p.a11, p.a12, p.a21, p.a22))) ** 2
    assert abs(p.det - 1) <= 1e-12 * scale


@settings(max_examples=200)
@given(st.lists(any_t, min_size=1, max_size=40))
def test_reversal_invariance(ts):
    a = product(t_matrix(t) for t in ts).trace
    b = product(t_matrix(t) for t in reversed(ts)).trace
    assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


@settings(max_examples=200)
@given(st.lists(any_t, min_size=1, max_size=40))
def test_pendulum_form_conjugate(ts):
    a = product(t_matrix(t) for t in ts).trace
    b = product(pendulum_matrix(t) for t in ts).trace
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_batch_matches_scalar_products():
    rng = np.random.default_rng(3)
    ts, lengths = sl2.random_coefficient_batch(rng, 50, max_len=12)
    batch = sl2.batch_products(ts, lengths)
    for row, n, got in zip(ts, lengths, batch):
        ref = product(t_matrix(float(t)) for t in row[:n]).to_array()
        np.testing.assert_allclose(got, ref, rtol=1e-12)
