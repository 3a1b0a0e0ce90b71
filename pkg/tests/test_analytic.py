import json
import math
import random
from math import comb, factorial

import mpmath
import pytest

from ncho.analytic import (
    CheckReport,
    MCConfig,
    UhpPoint,
    Ve,
    Ve0_check,
    Ve_integral,
    Ve_integral_check,
    barnes_b,
    dG_series_value,
    dG_transform_check,
    eval_series,
    f21,
    g1_period_check,
    lambert_dG,
    mahler_u,
    mahler_u_closed,
    period_poly,
    r1_closed_coefficients,
    ramanujan_check,
    v_minus1_check,
    zeta2_special_value,
)
from ncho.qseries import QSeries, tmod, wtilde2, wtilde2_eta


def _theta_sums(tau, terms=40):
    """theta_2, theta_3, theta_4 with nome exp(pi i tau), summed from their definitions."""
    nome = mpmath.exp(1j * mpmath.pi * tau)
    th2 = mpmath.fsum(nome ** (mpmath.mpf(2 * n + 1) ** 2 / 4) for n in range(-terms, terms))
    th3 = mpmath.fsum(nome ** (n * n) for n in range(-terms, terms + 1))
    th4 = mpmath.fsum((-1) ** n * nome ** (n * n) for n in range(-terms, terms + 1))
    return th2, th3, th4


def _agm_k(z):
    """2F1(1/2, 1/2; 1; z) = 1 / AGM(1, sqrt(1 - z)), by a hand-rolled AGM."""
    a, b = mpmath.mpc(1), mpmath.sqrt(1 - mpmath.mpc(z))
    for _ in range(200):
        a, b = (a + b) / 2, mpmath.sqrt(a * b)
        if abs(a - b) < mpmath.mpf(2) ** (-mpmath.mp.prec - 4):
            break
    return 1 / a


def _random_taus(count, seed, im_lo=0.8, im_hi=3.0):
    rng = random.Random(seed)
    return [mpmath.mpc(rng.uniform(-0.5, 0.5), rng.uniform(im_lo, im_hi)) for _ in range(count)]


# --------------------------------------------------------------------------- #
# Summing q-series
# --------------------------------------------------------------------------- #


def test_eval_series_constant():
    res = eval_series(QSeries.constant(1, 5), 1j, 128)
    assert res.value.value == 1 and res.error < 1e-30


def test_tmod_at_i_matches_theta_quotient():
    with mpmath.workprec(200):
        th2, _, th4 = _theta_sums(mpmath.mpc(0, 1))
        oracle = -th2**4 / th4**4
        got = eval_series(tmod(60), 1j, 160).value.value
        assert abs(got - oracle) < 1e-30
        assert abs(oracle + 1) < 1e-40  # theta_2 = theta_4 at tau = i


def test_wtilde2_at_2i_matches_hypergeometric_closed_form():
    # sum_n jtilde(2, n) t^n = 2F1(1/2, 1/2; 1; t) / sqrt(1 - t), with t from direct theta sums
    with mpmath.workprec(200):
        tau = mpmath.mpc(0, 2)
        th2, _, th4 = _theta_sums(tau)
        t = -th2**4 / th4**4
        oracle = mpmath.hyp2f1(0.5, 0.5, 1, t) / mpmath.sqrt(1 - t)
        for series in (wtilde2(60), wtilde2_eta(60)):
            assert abs(eval_series(series, tau, 160).value.value - oracle) < 1e-30


def test_eval_series_tolerance_is_enforced():
    with pytest.raises(ValueError):
        eval_series(tmod(4), 0.6j, 128, tol=1e-30)
    with pytest.raises(ValueError):
        UhpPoint(-1j)
    with pytest.raises(ValueError):
        eval_series(tmod(4), 1.0, 128)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_lambert_matches_divisor_sum(k):
    with mpmath.workprec(200):
        for tau in _random_taus(10, seed=k):
            a = lambert_dG(k, tau, 128).value.value
            b = dG_series_value(k, tau, 128).value.value
            assert abs(a - b) <= 1e-15 * max(1, abs(a))


def test_lambert_matches_divisor_sum_tightly_at_2i():
    with mpmath.workprec(200):
        a = lambert_dG(1, 2j, 160).value.value
        b = dG_series_value(1, 2j, 160).value.value
        assert abs(a - b) < 1e-20


def test_lambert_at_large_height_is_constant_term():
    # as Im tau grows the series tends to (-1)^k (2k)!/(2 pi)^(2k) zeta(2k+1)
    with mpmath.workprec(200):
        for k in (1, 2):
            limit = (-1) ** k * factorial(2 * k) / (2 * mpmath.pi) ** (2 * k) * mpmath.zeta(2 * k + 1)
            assert abs(lambert_dG(k, 20j, 128).value.value - limit) < 1e-40


# --------------------------------------------------------------------------- #
# Double Bernoulli polynomials
# --------------------------------------------------------------------------- #


def test_barnes_small_values():
    with mpmath.workprec(128):
        # t^2 e^(zt)/((e^t - 1)^2) = 1 + (z - 1) t + ...
        z = mpmath.mpf(3) / 10
        assert abs(barnes_b(0, z, 1, 1, 96).value - 1) < 1e-25
        assert abs(barnes_b(1, z, 1, 1, 96).value - (z - 1)) < 1e-25
    with pytest.raises(ValueError):
        barnes_b(2, 1, 0, 1)


@pytest.mark.parametrize("m", range(0, 7))
def test_barnes_symmetric_in_periods(m):
    with mpmath.workprec(160):
        z, w1, w2 = mpmath.mpc(0.3, 0.7), mpmath.mpc(-1), mpmath.mpc(0.2, 1.1)
        a = barnes_b(m, z, w1, w2, 128).value
        b = barnes_b(m, z, w2, w1, 128).value
        assert abs(a - b) <= 1e-30 * max(1, abs(a))


@pytest.mark.parametrize("m,z", [(3, 2), (1, 0.5), (2, 1.25), (4, 3)])
def test_zeta2_special_value_against_hurwitz(m, z):
    # zeta_2(s, z | (1, 1)) = sum_n (n+1)(z+n)^(-s) = zeta(s-1, z) + (1-z) zeta(s, z)
    with mpmath.workprec(160):
        s = 1 - m
        oracle = mpmath.zeta(s - 1, z) + (1 - z) * mpmath.zeta(s, z)
        got = zeta2_special_value(m, z, 1, 1, 128).value
        assert abs(got - oracle) < 1e-8 * max(1, abs(oracle))


def test_barnes_value_behind_the_classical_zeta3_sum():
    # sum coth(pi n)/n^3 = 7 pi^3 / 180 forces B_{2,4}(i | (-1, i)) = -7i/30
    with mpmath.workprec(160):
        assert abs(barnes_b(4, 1j, -1, 1j, 128).value - mpmath.mpc(0, -7) / 30) < 1e-30


# --------------------------------------------------------------------------- #
# Transformation laws
# --------------------------------------------------------------------------- #


@pytest.mark.parametrize("k", [1, 2, 3])
def test_dG_transformation_law(k):
    for tau in _random_taus(10, seed=100 + k):
        assert dG_transform_check(k, tau, 128) <= 1e-10


@pytest.mark.parametrize("k", [1, 2, 3])
def test_printed_transformation_coefficient_fails(k):
    worst = max(dG_transform_check(k, tau, 128, printed=True) for tau in _random_taus(10, seed=100 + k))
    assert worst > 1e-3


@pytest.mark.parametrize("tau", [1j, mpmath.mpc(0.3, 0.9), mpmath.mpc(-0.2, 1.05), mpmath.mpc(0.1, 1.4)])
def test_g1_period_relation(tau):
    assert g1_period_check(tau, 128) <= 1e-8


def test_g1_period_rejects_points_near_real_line():
    with pytest.raises(ValueError):
        g1_period_check(0.3j, 128)


def test_period_polynomial_k1_matches_closed_form():
    with mpmath.workprec(160):
        z3, pi = mpmath.zeta(3), mpmath.pi
        oracle = [-56 * z3, 4 * pi**3 / 1j, 56 * z3]
        pp = period_poly(1, prec=128)
        assert pp.degree_bound == 2 and len(pp.coefficients) == 3
        assert pp.residual <= 1e-6
        for got, want in zip(pp.coefficients, oracle):
            assert abs(got.value - want) <= 1e-6 * max(1, abs(want))
        for got, want in zip(r1_closed_coefficients(128), oracle):
            assert abs(got - want) < 1e-30
        assert abs(pp(1j) - (-112 * z3 + 4 * pi**3)) <= 1e-5


def test_period_polynomial_k2_is_a_polynomial():
    pp = period_poly(2, prec=128)
    assert pp.degree_bound == 6
    assert pp.residual <= 1e-6


def test_period_polynomial_argument_checks():
    with pytest.raises(ValueError):
        period_poly(1, sample_points=[1j, 1.1j, 1.2j])
    with pytest.raises(ValueError):
        period_poly(1, sample_points=[1j, 1j, 1.1j, 1.2j])
    with pytest.raises(ValueError):
        period_poly(0)


@pytest.mark.parametrize("k", [1, 3, 5])
def test_ramanujan_closed_form(k):
    assert ramanujan_check(k, 128) <= 1e-12


def test_ramanujan_lhs_oracle_k1():
    # the check's left side at k = 1 equals (zeta(3) + 7 pi^3/180)/2
    with mpmath.workprec(160):
        lhs = mpmath.nsum(lambda n: 1 / (n**3 * (1 - mpmath.exp(-2 * mpmath.pi * n))), [1, mpmath.inf])
        assert abs(lhs - (mpmath.zeta(3) + 7 * mpmath.pi**3 / 180) / 2) < 1e-30


def test_ramanujan_printed_factor_fails_and_even_k_rejected():
    assert ramanujan_check(3, 128, printed=True) > 1e-3
    for k in (0, 2, 4):
        with pytest.raises(ValueError):
            ramanujan_check(k)


# --------------------------------------------------------------------------- #
# Hypergeometric values
# --------------------------------------------------------------------------- #

_F21_POINTS = [mpmath.mpf(x) / 20 for x in range(-18, 19, 3)] + [
    mpmath.mpc(0.3, 0.4), mpmath.mpc(-0.5, 0.2), mpmath.mpc(0.1, -0.8), mpmath.mpc(0.6, -0.6),
    mpmath.mpc(-0.2, -0.3), mpmath.mpc(0.0, 0.9), mpmath.mpc(0.45, 0.45)]


def test_f21_against_agm():
    assert len(_F21_POINTS) == 20
    with mpmath.workprec(128):
        for z in _F21_POINTS:
            got = f21(0.5, 0.5, 1, z, 96).value.value
            assert abs(got - _agm_k(z)) <= 1e-14 * abs(got), z


def test_f21_arcsine_form():
    with mpmath.workprec(128):
        z = mpmath.mpf(1) / 4
        oracle = mpmath.asin(mpmath.sqrt(z)) / (mpmath.sqrt(z) * mpmath.sqrt(1 - z))
        assert abs(f21(1, 1, 1.5, z, 96).value.value - oracle) < 1e-25


def test_f21_domain_checks():
    with pytest.raises(ValueError):
        f21(0.5, 0.5, 1, 0.96)
    with pytest.raises(ValueError):
        f21(0.5, 0.5, 0, 0.1)
    with pytest.raises(ValueError):
        f21(0.5, 0.5, -2, 0.1)


def test_Ve_values():
    with mpmath.workprec(128):
        assert abs(Ve(0, 0, 96) - mpmath.pi**2 / 2) < 1e-25
        for t in (0.1, 0.4, -0.7):
            assert abs(Ve(t, 0, 96) - mpmath.pi**2 / 2 * _agm_k(t)) < 1e-25
        lam = mpmath.mpf("0.2")
        assert abs(Ve(0, lam, 96) - mpmath.pi**2 / (2 * mpmath.cosh(mpmath.pi * lam) ** 2)) < 1e-25
    with pytest.raises(ValueError):
        Ve(1, 0)


@pytest.mark.parametrize("lam", [0.0, 0.1, 0.3, -0.45])
def test_Ve0_series(lam):
    assert Ve0_check(lam, 128) <= 1e-10


def test_Ve0_series_domain():
    with pytest.raises(ValueError):
        Ve0_check(0.5)


@pytest.mark.parametrize("t", [0.1, 0.5, -0.5, 0.9])
def test_v_minus1(t):
    assert v_minus1_check(t, 128) <= 1e-20
    with pytest.raises(ValueError):
        v_minus1_check(0)


# --------------------------------------------------------------------------- #
# Torus averages
# --------------------------------------------------------------------------- #


def _mahler_oracle(l, lam, terms=60):
    """Constant-term series: sum over n of binom(2n,n)^2 lam^(2n) (l=2) or (3n)!/n!^3 lam^(3n) (l=3)."""
    if l == 2:
        return sum(comb(2 * n, n) ** 2 * lam ** (2 * n) for n in range(terms))
    return sum(factorial(3 * n) // factorial(n) ** 3 * lam ** (3 * n) for n in range(terms))


@pytest.mark.parametrize("l,lam", [(2, 0.1), (2, 0.2), (3, 0.15), (3, -0.2)])
def test_mahler_closed_form_against_constant_terms(l, lam):
    assert math.isclose(mahler_u_closed(l, lam), _mahler_oracle(l, lam), rel_tol=1e-13)


def test_mahler_at_zero():
    est = mahler_u(2, 0.0)
    assert est.mean == 1 and est.samples >= 4181
    assert mahler_u_closed(6, 0.0) == 1


@pytest.mark.parametrize("l,lam", [(2, 0.2), (3, 0.2), (4, 0.2), (6, 0.05)])
def test_mahler_within_three_stderr(l, lam):
    est = mahler_u(l, lam)
    assert abs(est.mean - mahler_u_closed(l, lam)) <= 3 * est.stderr


def test_mahler_coverage_over_seeds():
    hits = 0
    for seed in range(20):
        est = mahler_u(2, 0.2, MCConfig(samples=610, shifts=8, seed=seed))
        hits += abs(est.mean - mahler_u_closed(2, 0.2)) <= 3 * est.stderr
    assert hits >= 19


def test_mahler_domain_checks():
    with pytest.raises(ValueError):
        mahler_u(5, 0.1)
    with pytest.raises(ValueError):
        mahler_u(2, 0.25)
    with pytest.raises(ValueError):
        MCConfig(samples=1)


@pytest.mark.parametrize("T,l", [(0.2, 2), (0.1, 4), (0.0, 3), (0.15, 6)])
def test_Ve_integral(T, l):
    assert Ve_integral_check(T, l) <= 1e-3


def test_Ve_integral_lattice_route_agrees():
    est = Ve_integral(0.2, 2, cfg=MCConfig(samples=4181, shifts=8, seed=1))
    grid = Ve_integral(0.2, 2)
    assert abs(est.mean - grid.mean) <= 1e-3 + 5 * est.stderr
    with pytest.raises(ValueError):
        Ve_integral(0.5, 2)


def test_check_report_json():
    rep = CheckReport("ramanujan", {"k": 1}, 1e-20, 1e-12, {"note": "x"})
    payload = json.loads(rep.to_json())
    assert payload["pass"] is True and payload["check"] == "ramanujan" and payload["note"] == "x"
    assert not CheckReport("x", {}, 1.0, 0.5).passed
