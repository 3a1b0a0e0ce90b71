import json
import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncho.apery import (
    SpectralParams,
    eval_j,
    j_explicit_smallL,
    j_formal,
    j_numeric_integral,
    j_numeric_series,
    jtilde,
    jtilde_explicit,
    jtilde_value,
    recurrence_residual,
    tables_to_csv,
    tables_to_json,
    z_relation_residual,
    zsum,
)
from ncho.numcore import FormalNumber, zeta_half


def _binom_half(j: int) -> Fraction:
    """binom(-1/2, j) by its product definition."""
    out = Fraction(1)
    for i in range(j):
        out *= Fraction(-1, 2) - i
        out /= i + 1
    return out


def _oracle_z(parity: str, s: int, k: int) -> Fraction:
    """Nested sums over k > j_1 > ... > j_s >= 0, written from the definition."""
    if s == 0:
        return Fraction(1) if parity == "even" else Fraction(0)
    total = Fraction(0)
    for chain in combinations(range(k), s):
        term = Fraction(1)
        smallest = min(chain)
        for j in chain:
            term /= (j + Fraction(1, 2)) ** 2
        if parity == "odd":
            term /= (smallest + Fraction(1, 2)) * _binom_half(smallest) ** 2
        total += term
    return (-1) ** s * total * (1 if parity == "even" else Fraction(1, 2))


def test_printed_rows():
    assert list(jtilde(2, 3).values) == [1, Fraction(3, 4), Fraction(41, 64), Fraction(147, 256)]
    assert list(jtilde(4, 3).values) == [0, 1, Fraction(11, 8), Fraction(907, 576)]
    assert list(jtilde(7, 4).values) == [0, 0, 0, Fraction(1, 36), Fraction(515, 6912)]
    assert jtilde_value(6, 4) == Fraction(3419, 4608)


@pytest.mark.parametrize("n", range(25))
def test_closed_forms_for_k1_k2(n):
    double_fact = math.prod(range(1, 2 * n + 2, 2))
    assert jtilde_value(1, n) == Fraction(2**n * math.factorial(n), double_fact)
    assert jtilde_value(2, n) == sum((-1) ** j * _binom_half(j) ** 2 * math.comb(n, j) for j in range(n + 1))


def test_zsum_examples():
    assert zsum("even", 0, 5) == 1
    assert zsum("even", 1, 1) == -4
    assert all(zsum(p, s, k) == 0 for p in ("even", "odd") for s in range(1, 5) for k in range(s))


@pytest.mark.parametrize("parity", ["even", "odd"])
@pytest.mark.parametrize("s", [1, 2, 3])
def test_zsum_against_definition(parity, s):
    for k in range(0, 9):
        assert zsum(parity, s, k) == _oracle_z(parity, s, k)


@pytest.mark.parametrize("parity", ["even", "odd"])
def test_z_descent_relation(parity):
    for s in range(1, 4):
        for k in range(0, 9):
            assert z_relation_residual(parity, s, k, cutoff=30) == 0


def test_explicit_examples():
    assert jtilde_explicit(4, 2) == Fraction(11, 8)
    assert jtilde_explicit(3, 1) == 1
    assert jtilde_explicit(6, 2) == Fraction(1, 4)


def test_route_equivalence():
    for k in range(3, 11):
        for n in range(31):
            assert jtilde_explicit(k, n) == jtilde_value(k, n), (k, n)


@pytest.mark.parametrize("s", range(1, 6))
def test_vanishing_and_leading_pattern(s):
    for k in (2 * s + 1, 2 * s + 2):
        table = jtilde(k, s + 1)
        assert all(table[n] == 0 for n in range(s))
        assert table[s] == Fraction(1, math.factorial(s) ** 2)


def test_formal_examples():
    assert j_formal(2, 0) == FormalNumber.pi2(1, Fraction(1, 2))
    assert j_formal(3, 1) == FormalNumber.rational(1) + FormalNumber.zeta(3, Fraction(21, 2))
    assert j_formal(4, 0) == FormalNumber.pi2(2, Fraction(1, 2))
    assert j_explicit_smallL(2, 1) == zeta_half(2) * Fraction(3, 4)
    assert j_explicit_smallL(3, 0) == FormalNumber.zeta(3, 14)
    assert j_explicit_smallL(4, 0) == FormalNumber.pi2(2, Fraction(1, 2))


def test_small_l_explicit_formulas():
    for l in (2, 3, 4):
        for n in range(16):
            assert j_explicit_smallL(l, n) == j_formal(l, n)


def test_recurrence_closure():
    zero = FormalNumber()
    for k in range(2, 9):
        for n in range(2, 21):
            res = recurrence_residual(lambda m: j_formal(k, m), lambda m: j_formal(k - 2, m), n)
            assert res == zero, (k, n)


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 14), st.integers(2, 40))
def test_normalized_tables_obey_recurrence(k, n):
    res = recurrence_residual(lambda m: jtilde_value(k, m), lambda m: jtilde_value(k - 2, m), n)
    assert res == 0


@pytest.mark.parametrize("k", range(2, 6))
@pytest.mark.parametrize("n", range(4))
def test_quadrature_route(k, n):
    est = j_numeric_integral(k, n)
    exact = eval_j(k, n)
    assert abs(est.value - exact) <= 1e-6 * abs(exact)


def test_series_route():
    assert abs(j_numeric_series(2, 0, 2000).value - 4.934802200544679) < 1e-5
    assert abs(j_numeric_series(3, 0, 2000).value - 16.828796644) < 1e-5
    est = j_numeric_series(4, 1, 500)
    assert abs(est.value - eval_j(4, 1)) <= 10 * est.error + 1e-12


def test_spectral_params():
    p = SpectralParams(2, 3)
    assert math.isclose(p.kappa, 1 / math.sqrt(5))
    assert 0 < p.epsilon < 1
    assert math.isclose(p.epsilon * (1 - p.epsilon**2) ** -0.5, p.kappa)
    SpectralParams(3, 0.5)
    with pytest.raises(ValueError):
        SpectralParams(1, 1)
    with pytest.raises(ValueError):
        SpectralParams(-2, -3)


def test_exports_round_trip():
    tables = [jtilde(k, 5) for k in (2, 5)]
    rows = tables_to_csv(tables).strip().splitlines()
    assert rows[0] == "k,n,value"
    assert rows[1 + 3] == "2,3,147/256"
    payload = json.loads(tables_to_json(tables))
    assert [Fraction(v) for v in payload[1]["values"]] == list(tables[1].values)
