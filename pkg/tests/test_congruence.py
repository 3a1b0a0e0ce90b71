from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncho.apery import jtilde_value
from ncho.congruence import (
    PAdic,
    binom_lemma_check,
    central_binom_experiment,
    conjecture_report,
    ordp,
    ordp_bound_check,
    padic_jtilde,
    residue,
    weak_congruence,
)


def _exact_scaled(parity: str, p: int, N: int, level: int, s: int) -> Fraction:
    k, e = (2 * s + 2, 2 * s) if parity == "even" else (2 * s + 1, 2 * s + 1)
    return Fraction(p) ** (e * level) * jtilde_value(k, N)


def _brute_weak(p: int, m: int, s: int, n: int) -> tuple[int, int]:
    lhs = _exact_scaled("even", p, m * p**n, n, s)
    rhs = _exact_scaled("even", p, m * p ** (n - 1), n - 1, s)
    return residue(lhs, p, n), residue(rhs, p, n)


def _val(x: Fraction, p: int, cap: int) -> int:
    return cap if x == 0 else min(cap, ordp(x, p))


def test_ordp_examples():
    assert ordp(Fraction(41, 64), 3) == 0
    assert ordp(Fraction(907, 576), 3) == -2
    assert ordp(Fraction(9, 4), 3) == 2
    with pytest.raises(ValueError):
        ordp(0, 3)


def test_residue_examples():
    assert residue(Fraction(3, 4), 5, 1) == 2
    assert residue(1, 7, 2) == 1
    # brute force: the x in [0, 9) with 64 x = 41 mod 9
    assert residue(Fraction(41, 64), 3, 2) == next(x for x in range(9) if (64 * x - 41) % 9 == 0) == 5
    with pytest.raises(ValueError):
        residue(Fraction(1, 3), 3, 1)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([3, 5, 7, 11, 13]), st.integers(-10**6, 10**6), st.integers(1, 10**6), st.integers(1, 5))
def test_residue_round_trip(p, a, b, n):
    x = Fraction(a, b)
    if x.denominator % p == 0:
        return
    r = residue(x, p, n)
    assert 0 <= r < p**n
    assert x == 0 and r == 0 or x - r == 0 or ordp(x - r, p) >= n
    pa = PAdic.from_rational(x, p, n + 2)
    if x != 0 and ordp(x, p) >= 0:
        assert pa.residue(n) == r


@pytest.mark.parametrize("parity", ["even", "odd"])
@pytest.mark.parametrize("p", [3, 5, 7])
def test_padic_route_matches_exact_tables(parity, p):
    for N in range(0, 30):
        for level in range(0, 3):
            for s in (1, 2, 3):
                exact = _exact_scaled(parity, p, N, level, s)
                got = padic_jtilde(parity, p, N, level, s, 3)
                if got.is_zero:
                    assert exact == 0 or ordp(exact, p) >= got.valuation
                else:
                    assert ordp(exact, p) == got.valuation
                    unit = exact / Fraction(p) ** got.valuation
                    assert residue(unit, p, got.precision) == got.unit_residue


def test_weak_examples():
    assert weak_congruence(5, 1, 1, 1)
    assert weak_congruence(7, 2, 1, 2)
    assert weak_congruence(3, 1, 2, 1)
    with pytest.raises(ValueError):
        weak_congruence(5, 3, 1, 1)
    with pytest.raises(ValueError):
        weak_congruence(9, 1, 1, 1)


@pytest.mark.parametrize("p,m,s,n", [(3, 1, 1, 1), (3, 1, 1, 2), (3, 1, 2, 3), (3, 1, 3, 3), (5, 1, 1, 2),
                                     (5, 2, 2, 2), (5, 2, 3, 1), (7, 1, 2, 2), (7, 3, 1, 1), (11, 5, 2, 1),
                                     (13, 4, 3, 1)])
def test_weak_residues_match_brute_force(p, m, s, n):
    res = weak_congruence(p, m, s, n)
    assert (res.lhs_residue, res.rhs_residue) == _brute_weak(p, m, s, n)
    assert res.holds


def _brute_conjecture(p, m, s, n_max, parity):
    ref = _exact_scaled(parity, p, m * p, 1, s)
    t = ordp(ref, p)
    rows = []
    for n in range(2, n_max + 1):
        cur = _exact_scaled(parity, p, m * p**n, n, s)
        prev = _exact_scaled(parity, p, m * p ** (n - 1), n - 1, s)
        congruent = _val(cur - prev, p, t + n) - t >= n
        nonzero = prev != 0 and ordp(prev, p) - t < n
        rows.append((congruent, nonzero))
    return t, rows


@pytest.mark.parametrize("p,m,s,parity", [(5, 1, 1, "even"), (3, 1, 1, "odd"), (3, 1, 2, "even"), (3, 2, 1, "odd"),
                                          (5, 2, 2, "odd"), (7, 1, 1, "even"), (3, 1, 3, "even")])
def test_conjecture_report_matches_brute_force(p, m, s, parity):
    n_max = 3 if m * p**3 <= 100 else 2
    rep = conjecture_report(p, m, s, n_max, parity)
    t, rows = _brute_conjecture(p, m, s, n_max, parity)
    assert rep.reference_order == t
    assert [(r.congruence_holds, r.nonzero_holds) for r in rep.rows] == rows


def test_conjecture_examples_and_precondition():
    assert conjecture_report(5, 1, 1, 2, "even").all_pass
    assert conjecture_report(3, 1, 1, 2, "odd").all_pass
    with pytest.raises(ValueError):
        conjecture_report(3, 1, 5, 2)


def test_binomial_lemma_examples():
    assert binom_lemma_check(5, 1, 2, 1)
    assert binom_lemma_check(7, 1, 1, 2)
    assert binom_lemma_check(3, 2, 2, 3)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_binomial_lemma_exhaustive(p):
    for m in range(1, 11):
        for n in range(1, 4):
            for j in range(1, 31):
                assert binom_lemma_check(p, m, n, j), (p, m, n, j)


def test_ordp_bound_examples():
    assert ordp_bound_check(3, 1, 1)
    assert ordp_bound_check(5, 2, 12)
    assert ordp_bound_check(7, 1, 3)
    with pytest.raises(ValueError):
        ordp_bound_check(3, 1, 4)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_ordp_bound_exhaustive(p):
    for n in range(0, 4):
        for j in range(0, 31):
            if 2 * j + 1 < p ** (n + 1):
                assert ordp_bound_check(p, n, j)


@pytest.mark.parametrize("p,j_max", [(3, 10), (5, 10), (7, 5), (3, 120)])
def test_central_binomial_proved_part(p, j_max):
    rows = central_binom_experiment(p, j_max)
    assert len(rows) == j_max + 1
    assert all(r.proved_holds for r in rows)


def test_central_binomial_oracle():
    p = 5
    for row in central_binom_experiment(p, 30):
        jp = (p * (2 * row.j + 1) - 1) // 2
        a, b = comb(2 * jp, jp), (-1) ** ((p - 1) // 2) * comb(2 * row.j, row.j)
        assert row.proved_holds == ((a - b) % p ** (row.r + 1) == 0)
        assert row.conjectural_holds == ((a - b) % p ** (row.s + row.r + 1) == 0)
