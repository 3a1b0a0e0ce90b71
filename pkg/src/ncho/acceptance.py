"""The acceptance suite: one function per criterion, shared by the CLI and the tests."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath

from . import analytic, apery, congruence, qseries, specint
from .numcore import FormalNumber

__all__ = ["CriterionResult", "CRITERIA", "PRINTED_TABLE", "WEAK_CONGRUENCE_PRIMES", "run_criterion", "run_all",
           "weak_congruence_cases", "TAU_POINTS"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    informational: bool = False
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def status(self) -> str:
        if self.informational:
            return "INFO"
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        return f"[{self.status}] criterion {self.number:>2}: {self.title} ({self.seconds:.1f} s)"

    def to_dict(self) -> dict:
        return {"criterion": self.number, "title": self.title, "status": self.status,
                "pass": self.passed, "informational": self.informational,
                "seconds": round(self.seconds, 3), "detail": self.detail}


def _F(text: str) -> Fraction:
    return Fraction(text)


PRINTED_TABLE: dict[int, list[Fraction]] = {
    1: [_F(x) for x in "1 2/3 8/15 16/35 128/315 256/693 1024/3003 2048/6435 32768/109395".split()],
    2: [_F(x) for x in ("1 3/4 41/64 147/256 8649/16384 32307/65536 487889/1048576 1856307/4194304 "
                        "454689481/1073741824").split()],
    3: [_F(x) for x in ("0 1 65/48 13247/8640 704707/430080 660278641/387072000 357852111131/204374016000 "
                        "309349386395887/173581664256000").split()],
    4: [_F(x) for x in ("0 1 11/8 907/576 1739/1024 6567221/3686400 54281321/29491200 7260544493/3853516800 "
                        "709180003579/369937612800").split()],
    5: [_F(x) for x in ("0 0 1/4 109/216 101717/138240 4557449/4838400 15689290781/13934592000 "
                        "131932666373/102187008000 144010453389429161/99983038611456000").split()],
    6: [_F(x) for x in ("0 0 1/4 73/144 3419/4608 29273/30720 151587391/132710400 232347221/176947200 "
                        "2444144299823/1664719257600").split()],
    7: [_F(x) for x in ("0 0 0 1/36 515/6912 76667/576000 115560397/580608000 1051251017/3901685760 "
                        "18813135818903/54935735500800").split()],
    8: [_F(x) for x in ("0 0 0 1/36 43/576 15389/115200 1659311/8294400 251914357/928972800 "
                        "10258433947/29727129600").split()],
}

WEAK_CONGRUENCE_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)

TAU_POINTS = ("1j", "2j", "0.5+1j", "-0.3+0.8j", "1+1j", "0.2+1.5j", "-1+1.2j", "0.7+0.9j", "0.1+0.7j", "-0.45+1.1j")


def weak_congruence_cases(p_max: int = 47, s_max: int = 3, n_max: int = 3, cap: int = 10**5):
    for p in (q for q in WEAK_CONGRUENCE_PRIMES if q <= p_max):
        for m in range(1, (p + 1) // 2):
            for s in range(1, s_max + 1):
                for n in range(1, n_max + 1):
                    if m * p**n <= cap:
                        yield p, m, s, n


def criterion_1(order: int = 40, seed: int = 0) -> CriterionResult:
    mismatches = []
    for k, row in PRINTED_TABLE.items():
        table = apery.jtilde(k, 8)
        for n, v in enumerate(row):
            if table[n] != v:
                mismatches.append({"k": k, "n": n, "printed": str(v), "computed": str(table[n])})
    return CriterionResult(1, "printed table of normalized numbers", not mismatches,
                           detail={"entries": sum(map(len, PRINTED_TABLE.values())), "mismatches": mismatches})


def criterion_2(order: int = 40, seed: int = 0) -> CriterionResult:
    bad = [(k, n) for k in range(3, 11) for n in range(31) if apery.jtilde_explicit(k, n) != apery.jtilde_value(k, n)]
    bad_small = [(l, n) for l in (2, 3, 4) for n in range(16) if apery.j_explicit_smallL(l, n) != apery.j_formal(l, n)]
    return CriterionResult(2, "explicit sums equal the recurrence", not bad and not bad_small,
                           detail={"explicit_vs_recurrence_mismatches": bad, "small_l_mismatches": bad_small})


def criterion_3(order: int = 40, seed: int = 0) -> CriterionResult:
    zero = FormalNumber()
    bad = []
    for k in range(2, 9):
        for n in range(2, 21):
            r = apery.recurrence_residual(lambda m: apery.j_formal(k, m), lambda m: apery.j_formal(k - 2, m), n)
            if r != zero:
                bad.append((k, n))
    return CriterionResult(3, "three-term recurrence for J_k(n)", not bad, detail={"failures": bad})


def criterion_4(order: int = 40, seed: int = 0) -> CriterionResult:
    failures = []
    count = 0
    for p, m, s, n in weak_congruence_cases():
        count += 1
        res = congruence.weak_congruence(p, m, s, n)
        if not res:
            failures.append(res.to_dict())
    return CriterionResult(4, "weak congruence theorem sweep", not failures,
                           detail={"cases": count, "failures": failures})


def criterion_5(order: int = 40, seed: int = 0) -> CriterionResult:
    failing = []
    count = 0
    for p in (3, 5, 7, 11, 13):
        for m in (1, 2):
            for s in (1, 2):
                for parity in ("even", "odd"):
                    rep = congruence.conjecture_report(p, m, s, 3, parity)
                    count += 1
                    if not rep.all_pass:
                        failing.append(rep.to_dict())
    return CriterionResult(5, "conjectured ratio congruence evidence", not failing,
                           detail={"reports": count, "failing_reports": failing})


def _agreement_detail(a: qseries.Agreement) -> dict:
    d = {"holds": a.holds, "compared_to": str(a.compared_to)}
    if not a.holds:
        d.update(first_mismatch=str(a.first_mismatch), lhs=str(a.lhs), rhs=str(a.rhs))
    return d


def criterion_6_parts(order: int = 40) -> dict[str, qseries.Agreement]:
    """Every sub-check of criterion 6 at the given order."""
    parts = {
        "tmod": qseries.agree(qseries.tmod_theta(order), qseries.tmod_eta(order), order),
        "tmod_printed_eta_times_16": qseries.agree(qseries.tmod_printed_eta(order).scale(16),
                                                   qseries.tmod_theta(order), order),
        "fquartic": qseries.agree(qseries.fquartic_theta(order), qseries.fquartic_eisenstein(order), order),
        "G1_closed_form": qseries.agree(qseries.bigG(1, order), qseries.bigG1_closed(order), order),
        "verify_w2": qseries.verify_w2(order),
        "verify_w4": qseries.verify_w4(order),
        "verify_w6": qseries.verify_w6(order),
        "theta_hypergeom": qseries.theta_hypergeom_check(order),
    }
    for k in (2, 3):
        parts[f"cprime_check_{k}"] = qseries.cprime_check(k, order)
    return parts


def criterion_6(order: int = 40, seed: int = 0) -> CriterionResult:
    parts = criterion_6_parts(order)
    return CriterionResult(6, "q-series identities", all(parts.values()),
                           detail={name: _agreement_detail(a) for name, a in parts.items()})


def criterion_7(order: int = 40, seed: int = 0) -> CriterionResult:
    bad = []
    for k in (1, 2, 3):
        g = qseries.dG(k, 20 * 8)
        for n in range(1, 21):
            lhs = qseries.hecke(g, n, -2 * k)
            rhs = g.truncate(lhs.order).scale(qseries.sigma_div(-2 * k - 1, n))
            if not qseries.agree(lhs, rhs):
                bad.append({"k": k, "n": n})
    g = qseries.dG(1, 6 * 12)
    t23 = qseries.hecke(qseries.hecke(g, 3, -2), 2, -2)
    t6 = qseries.hecke(g, 6, -2, t23.order)
    composite = bool(qseries.agree(t23, t6))
    return CriterionResult(7, "Hecke eigenforms", not bad and composite,
                           detail={"eigen_failures": bad, "T2T3_equals_T6": composite})


def criterion_8(order: int = 40, seed: int = 0, prec: int = 256) -> CriterionResult:
    with mpmath.workprec(prec):
        transform = {f"k={k}": max(analytic.dG_transform_check(k, complex(t), prec) for t in TAU_POINTS)
                     for k in (1, 2, 3)}
        printed = {f"k={k}": max(analytic.dG_transform_check(k, complex(t), prec, printed=True) for t in TAU_POINTS)
                   for k in (1, 2, 3)}
        g1 = {t: analytic.g1_period_check(complex(t), prec) for t in ("1j", "2j", "1+1j")}
        p1 = analytic.period_poly(1, prec=prec)
        closed = analytic.r1_closed_coefficients(prec)
        rel = [float(abs(a - b) / abs(b)) for a, b in zip(p1.coefficients, closed) if b != 0]
        zero_ok = all(abs(a) < 1e-6 for a, b in zip(p1.coefficients, closed) if b == 0)
        p2 = analytic.period_poly(2, prec=prec)
    ok = (all(v <= 1e-10 for v in transform.values()) and all(v <= 1e-8 for v in g1.values())
          and max(rel) <= 1e-6 and zero_ok and p2.residual <= 1e-6)
    return CriterionResult(8, "analytic transformation laws", ok, detail={
        "dG_transform_max_residual": transform, "printed_coefficient_max_residual": printed,
        "g1_period_residual": g1, "period_poly1_max_relative_error": max(rel),
        "period_poly1_residual": float(p1.residual), "period_poly2_residual": float(p2.residual)})


def criterion_9(order: int = 40, seed: int = 0, prec: int = 256) -> CriterionResult:
    res = {k: analytic.ramanujan_check(k, prec) for k in (1, 3)}
    printed = {k: analytic.ramanujan_check(k, prec, printed=True) for k in (1, 3)}
    return CriterionResult(9, "Ramanujan-type values", all(v <= 1e-12 for v in res.values()),
                           detail={"residual": res, "printed_factor_residual": printed})


def criterion_10(order: int = 40, seed: int = 0) -> CriterionResult:
    rng = random.Random(seed)

    def rand_u(k: int) -> list[Fraction]:
        return [Fraction(rng.randint(1, 99), 100) for _ in range(k)]

    vn_bad = [k for k in range(2, 7) for _ in range(200) if not specint.vn_check(k, rand_u(k))]
    den_bad = []
    for k in range(2, 7):
        for size in (2, 4):
            if size > k:
                continue
            for _ in range(10):
                js = sorted(rng.sample(range(1, k + 1), size))
                kappa = Fraction(rng.randint(1, 20), rng.randint(1, 20))
                if not specint.den_expand_check(k, rand_u(k), kappa, js):
                    den_bad.append((k, js))
    quad = {}
    for kappa in (0.2, 0.5, 0.8):
        est = specint.r1_quad(2, kappa).value
        closed = 3 * float(mpmath.zeta(2)) * float(analytic.f21(0.25, 0.75, 1, -kappa**2).value.real) ** 2
        quad[kappa] = abs(est - closed) / closed
    z2 = specint.zetaQ(2, apery.SpectralParams(2, 3)).value
    z2c = specint.zetaQ2_closed(2, 3)
    degenerate = {}
    for k in range(2, 6):
        v = specint.zetaQ(k, apery.SpectralParams(2, 2)).value
        ref = specint.zetaQ_degenerate(k, 2)
        degenerate[k] = abs(v - ref) / ref
    ok = (not vn_bad and not den_bad and all(e <= 1e-3 for e in quad.values())
          and abs(z2 - z2c) / z2c <= 1e-3 and all(e <= 1e-3 for e in degenerate.values()))
    return CriterionResult(10, "special-value integrals", ok, detail={
        "vn_failures": vn_bad, "den_failures": den_bad, "r1_quad_relative_error": quad,
        "zetaQ2_relative_error": abs(z2 - z2c) / z2c, "degenerate_relative_error": degenerate})


def criterion_11(order: int = 40, seed: int = 0) -> CriterionResult:
    ve0 = analytic.Ve0_check(0.3)
    mahler = {}
    cfg = analytic.MCConfig(seed=analytic.MCConfig().seed + seed)
    for l, lam in ((2, 0.1), (3, 0.05), (4, 0.05), (6, 0.02)):
        est = analytic.mahler_u(l, lam, cfg)
        mahler[f"l={l}"] = abs(est.mean - analytic.mahler_u_closed(l, lam)) / est.stderr
    vint = analytic.Ve_integral_check(0.2, 2)
    ok = ve0 <= 1e-10 and all(z <= 3 for z in mahler.values()) and vint <= 1e-3
    return CriterionResult(11, "meta generating function and Mahler averages", ok, detail={
        "Ve0_residual": float(ve0), "mahler_stderr_multiples": mahler, "Ve_integral_residual": float(vint)})


def criterion_12(order: int = 40, seed: int = 0) -> CriterionResult:
    diff = qseries.g1_phi1_difference(order)
    coeffs = [str(c) for c in diff.coeffs[:8]]
    return CriterionResult(12, "G1 against phi1 + 56 zeta(3), difference series", True, informational=True,
                           detail={"difference_first_coefficients": coeffs, "order": order})


CRITERIA: dict[int, Callable[..., CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
}


def run_criterion(number: int, order: int = 40, seed: int = 0) -> CriterionResult:
    start = time.perf_counter()
    res = CRITERIA[number](order=order, seed=seed)
    res.seconds = time.perf_counter() - start
    return res


def run_all(order: int = 40, seed: int = 0) -> list[CriterionResult]:
    return [run_criterion(n, order, seed) for n in sorted(CRITERIA)]
