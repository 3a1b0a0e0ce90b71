"""Numerical evaluation on the upper half plane.

q-series are summed at q = exp(2 pi i tau) with an estimate of the neglected tail.
On top of that sit the transformation-law checks for differential Eisenstein
series and the iterated integrals G_k, the double Bernoulli polynomials, a Gauss
hypergeometric evaluator, and the Mahler-measure and meta-generating-function
checks.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .numcore import BigComplex, FormalNumber, eval_formal, pi_value, zeta_half, zeta_odd_value
from .qseries import QSeries, bigG, bigG1_closed, dG

__all__ = [
    "UhpPoint",
    "MCConfig",
    "NumericResult",
    "MCEstimate",
    "CheckReport",
    "PeriodPolynomial",
    "eval_series",
    "lambert_dG",
    "dG_series_value",
    "barnes_b",
    "zeta2_special_value",
    "dG_transform_check",
    "g1_period_check",
    "default_period_points",
    "period_poly",
    "r1_closed_coefficients",
    "ramanujan_check",
    "f21",
    "Ve",
    "Ve0_check",
    "v_minus1_check",
    "mahler_u",
    "mahler_u_closed",
    "Ve_integral",
    "Ve_integral_check",
]

DEFAULT_PREC = 256


# --------------------------------------------------------------------------- #
# Small value types
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class UhpPoint:
    """A point tau of the upper half plane."""

    tau: complex | mpmath.mpc

    def __post_init__(self) -> None:
        if mpmath.mpc(self.tau).imag <= 0:
            raise ValueError(f"{self.tau} is not in the upper half plane")

    @property
    def value(self) -> mpmath.mpc:
        return mpmath.mpc(self.tau)


def _tau(x: object) -> mpmath.mpc:
    if isinstance(x, UhpPoint):
        return x.value
    if isinstance(x, BigComplex):
        x = x.value
    v = mpmath.mpc(x)
    if v.imag <= 0:
        raise ValueError(f"{x} is not in the upper half plane")
    return v


@dataclass(frozen=True)
class MCConfig:
    """Lattice Monte Carlo settings: points per randomly shifted copy, copies, seed."""

    samples: int = 4181
    shifts: int = 16
    seed: int = 20240601

    def __post_init__(self) -> None:
        if self.samples < 2 or self.shifts < 2:
            raise ValueError("need at least two samples and two shifts")


@dataclass(frozen=True)
class NumericResult:
    value: BigComplex
    error: float

    def __complex__(self) -> complex:
        return complex(self.value)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    samples: int


@dataclass(frozen=True)
class CheckReport:
    check: str
    parameters: dict
    residual: float
    tolerance: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def to_dict(self) -> dict:
        d = {"check": self.check, "parameters": self.parameters, "residual": self.residual,
             "tolerance": self.tolerance, "pass": self.passed}
        d.update(self.extra)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), default=str)


# --------------------------------------------------------------------------- #
# q-series at a point
# --------------------------------------------------------------------------- #


def _coeff_value(c: object, prec: int) -> mpmath.mpc:
    if isinstance(c, FormalNumber):
        return eval_formal(c, prec).value
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpmathify(c)


def eval_series(g: QSeries, tau: object, prec: int = DEFAULT_PREC, tol: float | None = None) -> NumericResult:
    """Sum the series at q = exp(2 pi i tau).

    The error is an estimate of the neglected tail: the largest of the last known
    coefficients continued as a geometric series in |q|^(1/N), with one extra
    factor 1/(1-r) allowing for polynomial growth.  With ``tol`` set, a larger
    estimate raises ValueError.
    """
    t = _tau(tau)
    with mpmath.workprec(prec + 32):
        base = mpmath.exp(2j * mpmath.pi * t / g.N)
        r = abs(base)
        total = mpmath.mpc(0)
        power = mpmath.mpc(1)
        for c in g.coeffs:
            if c:
                total += _coeff_value(c, prec + 32) * power
            power *= base
        window = g.coeffs[max(0, (3 * g.order) // 4):]
        cmax = max((abs(_coeff_value(c, prec + 32)) for c in window if c), default=mpmath.mpf(0))
        tail = cmax * r**g.order / (1 - r) ** 2
        err = float(tail + mpmath.mpf(2) ** (-prec) * abs(total))
        if tol is not None and err > tol:
            raise ValueError(f"series known to q^{g.q_order} is too short at tau={t}: tail ~ {err:.3g}")
        return NumericResult(BigComplex(total, prec), err)


def _order_for(tau: mpmath.mpc, prec: int, extra: int = 8) -> int:
    """Number of q-powers for |q|^order below 2^-(prec+extra)."""
    im = float(tau.imag)
    return int(math.ceil((prec + extra) * math.log(2) / (2 * math.pi * im))) + 4


def _dg_prefactor(k: int) -> mpmath.mpf:
    return (-1) ** k * mpmath.factorial(2 * k) / (2 * mpmath.pi) ** (2 * k)


def lambert_dG(k: int, tau: object, prec: int = DEFAULT_PREC) -> NumericResult:
    """Differential Eisenstein series of weight -2k as a Lambert series.

    zeta(2k+1) + 2 sum n^(-2k-1) q^n / (1 - q^n), times (-1)^k (2k)!/(2 pi)^(2k).
    """
    if k < 1:
        raise ValueError("lambert_dG needs k >= 1")
    t = _tau(tau)
    with mpmath.workprec(prec + 32):
        q = mpmath.exp(2j * mpmath.pi * t)
        r = abs(q)
        s = mpmath.mpc(zeta_odd_value(2 * k + 1, prec + 32))
        qn = mpmath.mpc(1)
        eps = mpmath.mpf(2) ** (-(prec + 16))
        n = 0
        while True:
            n += 1
            qn *= q
            s += 2 * mpmath.mpf(n) ** (-2 * k - 1) * qn / (1 - qn)
            tail = 2 * r ** (n + 1) / (1 - r) ** 2
            if tail < eps:
                break
        pre = _dg_prefactor(k)
        return NumericResult(BigComplex(pre * s, prec), float(abs(pre) * tail))


def dG_series_value(k: int, tau: object, prec: int = DEFAULT_PREC) -> NumericResult:
    """The same function summed from its divisor-sum q-expansion."""
    t = _tau(tau)
    return eval_series(dG(k, _order_for(t, prec)), t, prec)


# --------------------------------------------------------------------------- #
# Double Bernoulli polynomials
# --------------------------------------------------------------------------- #


def barnes_b(m: int, z: object, w1: object, w2: object, prec: int = DEFAULT_PREC) -> BigComplex:
    """B_{2,m}(z | (w1, w2)) from t^2 e^(zt) / ((e^(w1 t) - 1)(e^(w2 t) - 1)).

    Both factors (e^(w t) - 1)/t are expanded, multiplied, and divided into the
    expansion of e^(z t), all as truncated power series.
    """
    if m < 0:
        raise ValueError("barnes_b needs m >= 0")
    with mpmath.workprec(prec + 32):
        z, w1, w2 = (mpmath.mpmathify(x) for x in (z, w1, w2))
        if w1 == 0 or w2 == 0:
            raise ValueError("periods must be nonzero")
        size = m + 1
        fact = [mpmath.factorial(j) for j in range(size + 1)]
        ez = [z**j / fact[j] for j in range(size)]
        a = [w1 ** (j + 1) / fact[j + 1] for j in range(size)]
        b = [w2 ** (j + 1) / fact[j + 1] for j in range(size)]
        ab = [mpmath.fsum(a[i] * b[j - i] for i in range(j + 1)) for j in range(size)]
        inv = [1 / ab[0]]
        for n in range(1, size):
            inv.append(-mpmath.fsum(ab[j] * inv[n - j] for j in range(1, n + 1)) / ab[0])
        coeff = mpmath.fsum(ez[i] * inv[m - i] for i in range(m + 1))
        return BigComplex(coeff * fact[m], prec)


def zeta2_special_value(m: int, z: object, w1: object, w2: object, prec: int = DEFAULT_PREC) -> BigComplex:
    """zeta_2(1 - m, z | (w1, w2)) = B_{2,m+1}(z | w) / (m (m+1)) for m >= 1."""
    if m < 1:
        raise ValueError("needs m >= 1")
    b = barnes_b(m + 1, z, w1, w2, prec)
    return BigComplex(b.value / (m * (m + 1)), prec)


# --------------------------------------------------------------------------- #
# Transformation laws
# --------------------------------------------------------------------------- #


def dG_transform_check(k: int, tau: object, prec: int = DEFAULT_PREC, printed: bool = False) -> float:
    """Residual of the tau -> -1/tau law for the weight -2k differential Eisenstein series.

    The law checked is dG(-1/tau) = (-1/tau)^(2k) {dG(tau) + c zeta_2(-2k, tau | (-1, tau))}
    with c = 2 pi i, the derivative of exp(2 pi i s) - 1.  ``printed=True`` uses
    c = -4 k pi i instead.
    """
    t = _tau(tau)
    with mpmath.workprec(prec + 32):
        s = -1 / t
        c = -4 * k * mpmath.pi * 1j if printed else 2 * mpmath.pi * 1j
        z2 = barnes_b(2 * k + 2, t, -1, t, prec + 32).value / ((2 * k + 1) * (2 * k + 2))
        lhs = lambert_dG(k, s, prec + 32).value.value
        rhs = s ** (2 * k) * (lambert_dG(k, t, prec + 32).value.value + c * z2)
        return float(abs(lhs - rhs))


def _bigG_value(k: int, tau: mpmath.mpc, prec: int) -> mpmath.mpc:
    g = bigG1_closed(_order_for(tau, prec)) if k == 1 else bigG(k, _order_for(tau, prec))
    return eval_series(g, tau, prec).value.value


def g1_period_check(tau: object, prec: int = DEFAULT_PREC) -> float:
    """|tau^2 G~_1(-1/tau) - G~_1(tau) - 4 pi^3 tau / i| with G~_1 = G_1 - 56 zeta(3)."""
    t = _tau(tau)
    with mpmath.workprec(prec + 32):
        s = -1 / t
        if t.imag < 0.5 or s.imag < 0.5:
            raise ValueError("g1_period_check needs Im tau and Im(-1/tau) at least 1/2")
        z3 = 56 * zeta_odd_value(3, prec + 32)
        a = _bigG_value(1, s, prec + 32) - z3
        b = _bigG_value(1, t, prec + 32) - z3
        return float(abs(t**2 * a - b - 4 * mpmath.pi**3 * t / 1j))


@dataclass(frozen=True)
class PeriodPolynomial:
    """tau^(4k-2) G_k(-1/tau) - G_k(tau) fitted as a polynomial (ascending coefficients)."""

    k: int
    degree_bound: int
    coefficients: tuple[BigComplex, ...]
    residual: float
    condition: float

    def __call__(self, tau: object) -> mpmath.mpc:
        t = mpmath.mpc(tau)
        return mpmath.polyval([c.value for c in reversed(self.coefficients)], t)


def default_period_points(k: int) -> list[mpmath.mpc]:
    """4k+4 distinct points near the unit circle with Im tau and Im(-1/tau) above 1/2."""
    n = 4 * k + 4
    pts = []
    for j in range(n):
        theta = mpmath.pi * (mpmath.mpf(1) / 4 + mpmath.mpf(j) / (2 * (n - 1)))
        rho = mpmath.mpf("0.88") + mpmath.mpf("0.24") * ((j * 7) % n) / n
        pts.append(rho * mpmath.expjpi(theta / mpmath.pi))
    return pts


def period_poly(k: int, sample_points: Sequence[object] | None = None, prec: int = DEFAULT_PREC) -> PeriodPolynomial:
    """Interpolate the period function on 4k-1 points and validate on the rest."""
    if k < 1:
        raise ValueError("period_poly needs k >= 1")
    pts = [_tau(p) for p in (sample_points if sample_points is not None else default_period_points(k))]
    deg = 4 * k - 2
    if len(pts) < deg + 2:
        raise ValueError(f"need at least {deg + 2} points (fit plus held-out)")
    if len(set((complex(p) for p in pts))) != len(pts):
        raise ValueError("sample points must be distinct")
    with mpmath.workprec(prec + 32):
        vals = []
        for t in pts:
            s = -1 / t
            if min(t.imag, s.imag) < mpmath.mpf("0.3"):
                raise ValueError(f"{t} is too close to the real line for this evaluation")
            vals.append(t**deg * _bigG_value(k, s, prec + 32) - _bigG_value(k, t, prec + 32))
        fit_pts, fit_vals = pts[: deg + 1], vals[: deg + 1]
        V = mpmath.matrix([[p**j for j in range(deg + 1)] for p in fit_pts])
        cond = mpmath.mnorm(V, 1) * mpmath.mnorm(mpmath.inverse(V), 1)
        coeffs = mpmath.lu_solve(V, mpmath.matrix(fit_vals))
        coeff_list = [coeffs[j] for j in range(deg + 1)]
        residual = mpmath.mpf(0)
        for t, v in zip(pts[deg + 1:], vals[deg + 1:]):
            fitted = mpmath.fsum(c * t**j for j, c in enumerate(coeff_list))
            residual = max(residual, abs(fitted - v) / max(1, abs(v)))
        return PeriodPolynomial(k, deg, tuple(BigComplex(c, prec) for c in coeff_list), float(residual), float(cond))


def r1_closed_coefficients(prec: int = DEFAULT_PREC) -> tuple[mpmath.mpc, mpmath.mpc, mpmath.mpc]:
    """Ascending coefficients of 56 zeta(3)(tau^2 - 1) + 4 pi^3 tau / i."""
    with mpmath.workprec(prec + 32):
        z = 56 * zeta_odd_value(3, prec + 32)
        return (mpmath.mpc(-z), 4 * pi_value(prec + 32) ** 3 / 1j, mpmath.mpc(z))


def ramanujan_check(k: int, prec: int = DEFAULT_PREC, printed: bool = False) -> float:
    """Residual of the closed evaluation of sum 1/(n^(2k+1)(1 - e^(-2 pi n))) for odd k.

    The right side is -i (2 pi)^(2k+1) B_{2,2k+2}(i | (-1, i)) / (4 (-1)^k (2k+2)!)
    + zeta(2k+1)/2, which follows from the transformation law at tau = i.
    ``printed=True`` uses the factor k i / 2 in place of -i / 4.
    """
    if k < 1 or k % 2 == 0:
        raise ValueError("ramanujan_check needs odd k >= 1")
    with mpmath.workprec(prec + 32):
        e = mpmath.exp(-2 * mpmath.pi)
        eps = mpmath.mpf(2) ** (-(prec + 16))
        lhs = mpmath.mpf(0)
        # sum n^(-2k-1) + sum n^(-2k-1) e^n/(1-e^n), the first being zeta(2k+1)
        n = 0
        en = mpmath.mpf(1)
        while True:
            n += 1
            en *= e
            lhs += mpmath.mpf(n) ** (-2 * k - 1) * en / (1 - en)
            if en < eps:
                break
        lhs += zeta_odd_value(2 * k + 1, prec + 32)
        b = barnes_b(2 * k + 2, 1j, -1, 1j, prec + 32).value
        factor = k * 1j / 2 if printed else -1j / 4
        rhs = factor * (2 * mpmath.pi) ** (2 * k + 1) / ((-1) ** k * mpmath.factorial(2 * k + 2)) * b
        rhs += zeta_odd_value(2 * k + 1, prec + 32) / 2
        return float(abs(lhs - rhs))


# --------------------------------------------------------------------------- #
# Hypergeometric values
# --------------------------------------------------------------------------- #


def f21(a: object, b: object, c: object, z: object, prec: int = DEFAULT_PREC) -> NumericResult:
    """2F1(a, b; c; z) by direct summation with a term-ratio tail bound, |z| <= 0.95."""
    with mpmath.workprec(prec + 32):
        a, b, c, z = (mpmath.mpmathify(x) for x in (a, b, c, z))
        if abs(z) > mpmath.mpf("0.95"):
            raise ValueError("f21 is only summed for |z| <= 0.95")
        if c.imag == 0 and c.real <= 0 and c.real == int(c.real):
            raise ValueError("c must not be a non-positive integer")
        eps = mpmath.mpf(2) ** (-(prec + 8))
        total = mpmath.mpc(1)
        term = mpmath.mpc(1)
        az = abs(z)
        n = 0
        while True:
            term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
            n += 1
            total += term
            m = n
            if m > abs(c) + 1:
                # for j >= m the ratio modulus is at most az (m+|a|)(m+|b|)/((m-|c|)(m+1)), decreasing in m
                rho = az * (m + abs(a)) * (m + abs(b)) / ((m - abs(c)) * (m + 1))
                if rho < 1:
                    tail = abs(term) * rho / (1 - rho)
                    if tail < eps * max(1, abs(total)):
                        break
            if n > 200000:
                raise ArithmeticError("f21 series did not converge")
        return NumericResult(BigComplex(total, prec), float(tail))


def _ve_prefactor(lam: mpmath.mpc) -> mpmath.mpc:
    return mpmath.pi**2 / (2 * mpmath.cosh(mpmath.pi * lam) ** 2)


def Ve(t: object, lam: object, prec: int = DEFAULT_PREC) -> mpmath.mpc:
    """pi^2/(2 cosh^2(pi lam)) 2F1(1/2 + i lam, 1/2 - i lam; 1; t)."""
    with mpmath.workprec(prec + 32):
        lam = mpmath.mpmathify(lam)
        t = mpmath.mpmathify(t)
        if abs(t) >= 1:
            raise ValueError("Ve needs |t| < 1")
        h = f21(mpmath.mpf(1) / 2 + 1j * lam, mpmath.mpf(1) / 2 - 1j * lam, 1, t, prec).value.value
        out = _ve_prefactor(lam) * h
        return out.real if out.imag == 0 or abs(out.imag) < mpmath.mpf(2) ** (-prec) * abs(out) else out


def Ve0_check(lam: float, prec: int = DEFAULT_PREC) -> float:
    """|sum_k (2k+1) zeta(2k+2, 1/2) (-1)^k lam^(2k) - pi^2/(2 cosh^2(pi lam))| for |lam| < 1/2."""
    if abs(lam) >= 0.5:
        raise ValueError("the series needs |lam| < 1/2")
    with mpmath.workprec(prec + 32):
        lam = mpmath.mpf(lam)
        eps = mpmath.mpf(2) ** (-(prec + 8))
        total = mpmath.mpf(0)
        k = 0
        while True:
            term = (2 * k + 1) * eval_formal(zeta_half(2 * k + 2), prec + 32).real * (-1) ** k * lam ** (2 * k)
            total += term
            # ratio of successive terms tends to 4 lam^2
            if abs(term) < eps and k > 2:
                break
            k += 1
        return float(abs(total - _ve_prefactor(lam)))


def v_minus1_check(t: float, prec: int = DEFAULT_PREC) -> float:
    """|-1/4 sum t^n/(2n+3) + (v_1(t) - 1)/(4t)| with v_1(t) = artanh(sqrt t)/sqrt t."""
    if not 0 < abs(t) < 1:
        raise ValueError("needs 0 < |t| < 1")
    with mpmath.workprec(prec + 32):
        t = mpmath.mpf(t)
        series = -mpmath.nsum(lambda n: t**n / (2 * n + 3), [0, mpmath.inf]) / 4
        v1 = mpmath.atanh(mpmath.sqrt(t)) / mpmath.sqrt(t)
        return float(abs(series + (v1 - 1) / (4 * t)))


# --------------------------------------------------------------------------- #
# Torus averages
# --------------------------------------------------------------------------- #

_MAHLER_BOUND = {2: 4.0, 3: 3.0, 4: 3.0, 6: 3.0}
_MAHLER_C = {2: 2**4, 3: 3**3, 4: 2**6, 6: 2**4 * 3**3}


def _laurent(l: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if l == 2:
        return x + 1 / x + y + 1 / y
    if l == 3:
        return x * x / y + y * y / x + 1 / (x * y)
    if l == 4:
        return x * y * y + x / (y * y) + 1 / x
    if l == 6:
        return x * x / y - y / x - 1 / (x * y)
    raise ValueError("l must be 2, 3, 4 or 6")


def _fibonacci_at_least(n: int) -> tuple[int, int]:
    a, b = 1, 2
    while b < n:
        a, b = b, a + b
    return b, a


def _lattice_mean(f, cfg: MCConfig, dim_shift: np.random.Generator) -> tuple[float, float, int]:
    """Randomly shifted Fibonacci lattice rule on the unit square; returns mean, stderr, points."""
    n, g = _fibonacci_at_least(cfg.samples)
    i = np.arange(n)
    base = np.stack([i / n, (i * g % n) / n], axis=1)
    means = np.empty(cfg.shifts)
    for r in range(cfg.shifts):
        pts = (base + dim_shift.random(2)) % 1.0
        means[r] = float(np.mean(f(pts[:, 0], pts[:, 1])))
    mean = float(np.mean(means))
    stderr = float(np.std(means, ddof=1) / math.sqrt(cfg.shifts))
    # rounding in the float64 sums is a genuine error source once the lattice error is tiny
    stderr = math.hypot(stderr, 4 * np.finfo(float).eps * math.sqrt(n) * abs(mean))
    return mean, stderr, n * cfg.shifts


def mahler_u(l: int, lam: float, cfg: MCConfig = MCConfig()) -> MCEstimate:
    """Torus average of 1/(1 - lam P_l(x, y)) by shifted lattice sampling."""
    if l not in _MAHLER_BOUND:
        raise ValueError("l must be 2, 3, 4 or 6")
    if abs(lam) * _MAHLER_BOUND[l] >= 1:
        raise ValueError("needs |lam| max|P_l| < 1 on the torus")
    rng = np.random.default_rng(cfg.seed)

    def integrand(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        x = np.exp(2j * np.pi * a)
        y = np.exp(2j * np.pi * b)
        return np.real(1.0 / (1.0 - lam * _laurent(l, x, y)))

    mean, stderr, count = _lattice_mean(integrand, cfg, rng)
    return MCEstimate(mean, stderr, count)


def mahler_u_closed(l: int, lam: float, prec: int = 128) -> float:
    """2F1(1/l, 1 - 1/l; 1; C_l lam^l)."""
    if l not in _MAHLER_C:
        raise ValueError("l must be 2, 3, 4 or 6")
    a = mpmath.mpf(1) / l
    return float(f21(a, 1 - a, 1, _MAHLER_C[l] * mpmath.mpf(lam) ** l, prec).value.real)


def _ve_integrand(T: float, l: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    xy = x * y
    return (1 + xy ** (l - 2)) / (1 - xy**l - T * (x**l - y**l))


def Ve_integral(T: float, l: int, nodes: int = 96, cfg: MCConfig | None = None) -> MCEstimate:
    """(l^2/2) times the unit-square integral of (1+(xy)^(l-2)) / (1-(xy)^l-T(x^l-y^l)).

    The integrand blows up like 1/distance at the corner (1, 1).  With u = 1 - x,
    v = 1 - y each triangle u >= v, v >= u is mapped by (u, v) = (s, s w) (or
    its mirror), whose Jacobian s cancels the singularity.  The smooth result is
    integrated by tensor Gauss-Legendre, or by lattice sampling when ``cfg`` is given.
    """
    if l not in (2, 3, 4, 6):
        raise ValueError("l must be 2, 3, 4 or 6")
    if abs(T) > 0.3:
        raise ValueError("needs |T| <= 0.3")

    def duffy(s: np.ndarray, w: np.ndarray) -> np.ndarray:
        u, v = s, s * w
        a = _ve_integrand(T, l, 1 - u, 1 - v)
        b = _ve_integrand(T, l, 1 - v, 1 - u)
        return (a + b) * s

    scale = l * l / 2
    if cfg is None:
        x, w = np.polynomial.legendre.leggauss(nodes)
        x = (x + 1) / 2
        w = w / 2
        S, W = np.meshgrid(x, x, indexing="ij")
        val = float(np.sum(np.outer(w, w) * duffy(S, W)))
        # the same rule at half the nodes gives a cheap error estimate
        x2, w2 = np.polynomial.legendre.leggauss(nodes // 2)
        x2 = (x2 + 1) / 2
        w2 = w2 / 2
        S2, W2 = np.meshgrid(x2, x2, indexing="ij")
        val2 = float(np.sum(np.outer(w2, w2) * duffy(S2, W2)))
        return MCEstimate(scale * val, scale * abs(val - val2), nodes * nodes)
    rng = np.random.default_rng(cfg.seed)
    mean, stderr, count = _lattice_mean(duffy, cfg, rng)
    return MCEstimate(scale * mean, scale * stderr, count)


def Ve_integral_check(T: float, l: int, nodes: int = 96, cfg: MCConfig | None = None) -> float:
    """|integral form - pi^2/(2 sin^2(pi/l)) 2F1(1/l, 1-1/l; 1; T^2)|."""
    lhs = Ve_integral(T, l, nodes, cfg).mean
    a = mpmath.mpf(1) / l
    rhs = mpmath.pi**2 / (2 * mpmath.sin(mpmath.pi / l) ** 2) * f21(a, 1 - a, 1, mpmath.mpf(T) ** 2, 64).value.real
    return float(abs(lhs - rhs))
