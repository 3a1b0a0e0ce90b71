"""Apéry-like numbers J_k(n) and their normalized rational companions.

Four independent routes are offered and cross-checked in the tests:

* the three-term recurrence, run k = 1, 2, 3, ... so the inhomogeneous term is
  always at hand (:func:`jtilde`);
* explicit binomial sums over nested harmonic-type sums (:func:`jtilde_explicit`,
  :func:`j_explicit_smallL`);
* the double series in m (:func:`j_numeric_series`);
* direct quadrature of the defining integral (:func:`j_numeric_integral`).
"""
from __future__ import annotations

import csv
import io
import json
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import mpmath
import numpy as np

from .numcore import FormalNumber, eval_formal, zeta_half

__all__ = [
    "JTable",
    "SpectralParams",
    "NumericEstimate",
    "binom_half_sq",
    "jtilde",
    "jtilde_value",
    "zsum",
    "ysum_truncated",
    "jtilde_explicit",
    "j_zero",
    "j_formal",
    "j_numeric_series",
    "j_numeric_integral",
    "j_explicit_smallL",
    "recurrence_residual",
    "tables_to_csv",
    "tables_to_json",
]

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class JTable:
    """Normalized numbers J~_k(0), ..., J~_k(n_max) for one k."""

    k: int
    values: tuple[Fraction, ...]

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n: int) -> Fraction:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SpectralParams:
    """Oscillator parameters alpha, beta > 0 with alpha*beta > 1."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.alpha * self.beta <= 1:
            raise ValueError("alpha*beta must exceed 1")

    @property
    def epsilon(self) -> float:
        return 1.0 / math.sqrt(self.alpha * self.beta)

    @property
    def kappa(self) -> float:
        return 1.0 / math.sqrt(self.alpha * self.beta - 1.0)


@dataclass(frozen=True)
class NumericEstimate:
    """A floating value together with an error estimate and a note on how it was made."""

    value: float
    error: float
    detail: str = ""


# --------------------------------------------------------------------------- #
# Binomial building blocks
# --------------------------------------------------------------------------- #


@lru_cache(maxsize=None)
def binom_half_sq(j: int) -> Fraction:
    """binom(-1/2, j)^2 = (C(2j, j) / 4^j)^2."""
    c = Fraction(math.comb(2 * j, j), 4**j)
    return c * c


def _outer_weights(n: int) -> list[Fraction]:
    """(-1)^i binom(-1/2, i)^2 C(n, i) for i = 0..n."""
    return [(-1) ** i * binom_half_sq(i) * math.comb(n, i) for i in range(n + 1)]


# --------------------------------------------------------------------------- #
# Recurrence route
# --------------------------------------------------------------------------- #

_tables: dict[int, list[Fraction]] = {}
_tables_lock = threading.RLock()


def _seed(k: int) -> list[Fraction]:
    if k == 1:
        return [Fraction(1)]
    if k == 2:
        return [Fraction(1)]
    j1 = Fraction(1) if k in (3, 4) else Fraction(0)
    return [Fraction(0), j1]


def _extend(k: int, n_max: int) -> list[Fraction]:
    with _tables_lock:
        vals = _tables.setdefault(k, _seed(k))
        if len(vals) > n_max:
            return vals
        if k == 1:
            for n in range(len(vals), n_max + 1):
                vals.append(vals[-1] * Fraction(2 * n, 2 * n + 1))
            return vals
        if k == 2:
            for n in range(len(vals), n_max + 1):
                vals.append(sum(_outer_weights(n), Fraction(0)))
            return vals
        lower = _extend(k - 2, n_max) if k > 2 else None
        for n in range(len(vals), n_max + 1):
            rhs = (8 * n * n - 8 * n + 3) * vals[n - 1] - 4 * (n - 1) ** 2 * vals[n - 2]
            rhs += 4 * lower[n - 1]
            vals.append(rhs / (4 * n * n))
        return vals


def jtilde(k: int, n_max: int) -> JTable:
    """Normalized numbers J~_k(n) for n = 0..n_max, exact.

    k = 1 and k = 2 come from their closed forms; every larger k runs the
    recurrence 4n^2 X(n) - (8n^2-8n+3) X(n-1) + 4(n-1)^2 X(n-2) = 4 J~_{k-2}(n-1)
    from the seeds J~_k(0) = 0 and J~_k(1) in {0, 1}.
    """
    if k < 1:
        raise ValueError("jtilde needs k >= 1")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    vals = _extend(k, max(n_max, 1))
    return JTable(k, tuple(vals[: n_max + 1]))


def jtilde_value(k: int, n: int) -> Fraction:
    if k <= 0:
        return Fraction(0)
    return _extend(k, max(n, 1))[n]


# --------------------------------------------------------------------------- #
# Nested sums and the explicit route
# --------------------------------------------------------------------------- #


def _w(j: int) -> Fraction:
    """1 / (j + 1/2)^2."""
    return Fraction(4, (2 * j + 1) ** 2)


def _w_odd(j: int) -> Fraction:
    """binom(-1/2, j)^-2 / (j + 1/2)^3, the weight on the smallest index of Z^odd."""
    return Fraction(8, (2 * j + 1) ** 3) / binom_half_sq(j)


def _z_columns(parity: str, s: int, k_max: int) -> list[Fraction]:
    """Z^parity_s(k) for k = 0..k_max by growing the index range one step at a time."""
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    if s < 0 or (parity == "odd" and s < 1):
        raise ValueError("s must be >= 1 (or 0 for even parity)")
    # e[i] = sum over chains k > j_1 > ... > j_i >= 0 of the chain weight without sign.
    # For odd parity the smallest index carries _w_odd, the others _w.
    e = [Fraction(0)] * (s + 1)
    if parity == "even":
        e[0] = Fraction(1)
    out = []
    for k in range(k_max + 1):
        out.append(e[s])
        w = _w(k)
        for i in range(s, 1, -1):
            e[i] += w * e[i - 1]
        if s >= 1:
            e[1] += w * e[0] if parity == "even" else _w_odd(k)
    sign = Fraction((-1) ** s) if parity == "even" else Fraction((-1) ** s, 2)
    return [sign * v for v in out]


def zsum(parity: str, s: int, k: int) -> Fraction:
    """Nested sum Z^even_s(k) or Z^odd_s(k) over chains k > j_1 > ... > j_s >= 0.

    Z^even_s(k) = (-1)^s sum prod 1/(j_i + 1/2)^2 and Z^even_0 = 1.  Z^odd_s
    carries an extra factor 1/(j_s + 1/2) binom(-1/2, j_s)^-2 on the smallest index
    and an overall 1/2.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    return _z_columns(parity, s, k)[k]


def zsum_bruteforce(parity: str, s: int, k: int) -> Fraction:
    """Direct enumeration of the index chains; slow, kept as a reference."""
    if parity == "even" and s == 0:
        return Fraction(1)
    total = Fraction(0)
    for chain in combinations(range(k - 1, -1, -1), s):
        term = Fraction(1)
        for j in chain[:-1]:
            term *= _w(j)
        term *= _w(chain[-1]) if parity == "even" else _w_odd(chain[-1])
        total += term
    return total * (-1) ** s * (1 if parity == "even" else HALF)


def ysum_truncated(parity: str, s: int, k: int, cutoff: int) -> Fraction:
    """Y^parity_s(k) with every index kept below ``cutoff``.

    Y^even_s(k) sums prod 1/(j_i+1/2)^2 over k <= j_1 <= ... <= j_s; Y^odd_s
    puts the odd weight on the largest index and has an overall 1/2.  The infinite
    sums are cut off, which leaves the relations against Z exact (they are
    polynomial identities in the weights).
    """
    if s == 0:
        return Fraction(1)
    # h[i] = complete homogeneous sums of degree i over indices in [k, j]
    h = [Fraction(1)] + [Fraction(0)] * s
    total_odd = Fraction(0)
    for j in range(k, cutoff):
        w = _w(j)
        for i in range(1, s + 1):
            h[i] += w * h[i - 1]
        if parity == "odd":
            total_odd += h[s - 1] * _w_odd(j)
    return h[s] if parity == "even" else total_odd / 2


def z_relation_residual(parity: str, s: int, k: int, cutoff: int) -> Fraction:
    """Z_s(k) - [Y_s(k) - sum_{j<s} Y_{s-j}(0) Z^even_j(k)] with truncated Y sums."""
    rhs = ysum_truncated(parity, s, k, cutoff)
    for j in range(s):
        rhs -= ysum_truncated(parity, s - j, 0, cutoff) * zsum("even", j, k)
    return zsum(parity, s, k) - rhs


def jtilde_explicit(k: int, n: int) -> Fraction:
    """J~_k(n) from the binomial sum over Z^even (k even) or Z^odd (k odd), k >= 3."""
    if k < 3:
        raise ValueError("jtilde_explicit needs k >= 3")
    parity = "even" if k % 2 == 0 else "odd"
    s = (k - 2) // 2 if parity == "even" else (k - 1) // 2
    zs = _z_columns(parity, s, n)
    return sum((c * z for c, z in zip(_outer_weights(n), zs)), Fraction(0))


# --------------------------------------------------------------------------- #
# Formal values J_k(n)
# --------------------------------------------------------------------------- #


def j_zero(m: int) -> FormalNumber:
    """J_m(0): 0 for m = 0, 1 for m = 1 and (m-1) zeta(m, 1/2) beyond."""
    if m <= 0:
        return FormalNumber()
    if m == 1:
        return FormalNumber.rational(1)
    return zeta_half(m) * (m - 1)


def j_formal(k: int, n: int) -> FormalNumber:
    """J_k(n) in the formal-constant ring, assembled from the normalized tables."""
    if k < 0 or n < 0:
        raise ValueError("k and n must be non-negative")
    if k == 0:
        return FormalNumber()
    if k == 1:
        return FormalNumber.rational(jtilde_value(1, n))
    s, odd = divmod(k, 2)
    if not odd:
        terms = (j_zero(2 * s - 2 * j) * jtilde_value(2 * j + 2, n) for j in range(s))
        out = FormalNumber()
    else:
        terms = (j_zero(2 * s + 1 - 2 * j) * jtilde_value(2 * j + 2, n) for j in range(s))
        out = FormalNumber.rational(jtilde_value(k, n))
    for t in terms:
        out = out + t
    return out


def recurrence_residual(seq_k, seq_km2, n: int):
    """Left side minus right side of the three-term recurrence at n >= 2."""
    return (4 * n * n * seq_k(n) - (8 * n * n - 8 * n + 3) * seq_k(n - 1)
            + 4 * (n - 1) ** 2 * seq_k(n - 2) - 4 * seq_km2(n - 1))


def j_explicit_smallL(l: int, n: int) -> FormalNumber:
    """J_l(n) for l in {2, 3, 4} from the printed binomial-sum formulas."""
    if l not in (2, 3, 4):
        raise ValueError("j_explicit_smallL supports l = 2, 3, 4 only")
    weights = _outer_weights(n)
    s0 = sum(weights, Fraction(0))
    if l == 2:
        return zeta_half(2) * s0
    inner = Fraction(0)
    acc = Fraction(0)
    for i, c in enumerate(weights):
        acc += c * inner
        if l == 3:
            inner += Fraction(8, (2 * i + 1) ** 3) / binom_half_sq(i)
        else:
            inner += _w(i)
    if l == 3:
        return FormalNumber.rational(-acc / 2) + zeta_half(3) * (2 * s0)
    return zeta_half(2) * (-acc) + zeta_half(4) * (3 * s0)


# --------------------------------------------------------------------------- #
# Numeric routes
# --------------------------------------------------------------------------- #


def j_numeric_series(k: int, n: int, m_max: int, prec: int = 128) -> NumericEstimate:
    """Partial sums of the double series in m, summed over r = 1..k-1.

    Terms decay like m^-k, so the neglected tail is of size m_max^(1-k).  For
    k = 2 that is too slow to be useful and one Richardson step (partial sums at
    m_max/2 and m_max) removes the leading 1/m part of the tail.
    """
    if k < 2:
        raise ValueError("j_numeric_series needs k >= 2")
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    signed = [(-1) ** j * math.comb(n, j) for j in range(n + 1)]
    with mpmath.workprec(prec + 4 * n + 16):
        partial = mpmath.mpf(0)
        half_point = None
        last = mpmath.mpf(0)
        binom = mpmath.mpf(1)
        for m in range(m_max + 1):
            if m:
                binom = binom * (2 * n + m) / m
            bases = [1 / (mpmath.mpf(m) + mpmath.mpf(0.5) + 2 * j) for j in range(n + 1)]
            s_r = []
            powers = [mpmath.mpf(1)] * (n + 1)
            for r in range(1, k):
                powers = [p * b for p, b in zip(powers, bases)]
                s_r.append(mpmath.fsum(c * p for c, p in zip(signed, powers)))
            last = binom * mpmath.fsum(s_r[r - 1] * s_r[k - r - 1] for r in range(1, k))
            partial += last
            if m == m_max // 2:
                half_point = partial
        # crude tail: the last term times m^k, integrated from m_max onward
        scale = abs(last) * mpmath.mpf(m_max) ** k
        tail = scale * mpmath.mpf(m_max) ** (1 - k) / (k - 1)
        if k == 2:
            value = 2 * partial - half_point
            detail = "richardson"
            tail = abs(partial - half_point) / m_max + abs(last)
        else:
            value = partial + tail  # tail estimate added, not just bounded
            detail = "partial+tail"
        return NumericEstimate(float(value), float(tail), detail)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
_OUTER_SCALE = 4.0


def _b_n(u: np.ndarray, n: int) -> np.ndarray:
    """B_n(u) for an array of u > 0, inner integral by 64-point Gauss-Legendre."""
    u = np.asarray(u, dtype=float)
    t = 0.5 * u[:, None] * (1.0 + _GL_NODES[None, :])
    inner = (-np.expm1(-2.0 * t)) ** n * (-np.expm1(-2.0 * (u[:, None] - t))) ** n
    integral = 0.5 * u * (inner @ _GL_WEIGHTS)
    # e^{nu} / sinh(u/2)^{2n+1} = 2^{2n+1} e^{-u/2} / (1 - e^{-u})^{2n+1}
    prefactor = 2.0 ** (2 * n + 1) * np.exp(-0.5 * u) / (-np.expm1(-u)) ** (2 * n + 1)
    return prefactor * integral


def _outer_integrand(x: np.ndarray, k: int, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    u = -_OUTER_SCALE * np.log1p(-x)
    jac = _OUTER_SCALE / (1.0 - x)
    vals = u ** (k - 2) / math.factorial(k - 2) * _b_n(u, n) * jac
    return vals / 2.0 ** (2 * n + 1)


_GK_X = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_GK_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_GK_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                   0.381830050505118944950369775488975, 0.417959183673469387755102040816327])


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    xs = np.concatenate([c - h * _GK_X[:-1], [c], c + h * _GK_X[:-1][::-1]])
    fx = f(xs)
    left, mid, right = fx[:7], fx[7], fx[8:][::-1]
    kron = h * (np.dot(_GK_WK[:-1], left + right) + _GK_WK[-1] * mid)
    gauss_idx = [1, 3, 5]
    gauss = h * (np.dot(_GK_WG[:-1], left[gauss_idx] + right[gauss_idx]) + _GK_WG[-1] * mid)
    return float(kron), float(abs(kron - gauss))


def _adaptive(f, a: float, b: float, tol: float, max_panels: int = 4000) -> tuple[float, float, bool]:
    """Adaptive bisection with Gauss-Kronrod panels; returns (value, error, converged)."""
    panels = [(a, b, *_gk15(f, a, b))]
    for _ in range(max_panels):
        total_err = sum(p[3] for p in panels)
        if total_err <= tol:
            return sum(p[2] for p in panels), total_err, True
        worst = max(range(len(panels)), key=lambda i: panels[i][3])
        lo, hi, _, _ = panels.pop(worst)
        mid = 0.5 * (lo + hi)
        panels.append((lo, mid, *_gk15(f, lo, mid)))
        panels.append((mid, hi, *_gk15(f, mid, hi)))
    return sum(p[2] for p in panels), sum(p[3] for p in panels), False


def j_numeric_integral(k: int, n: int, rel_tol: float = 1e-8) -> NumericEstimate:
    """J_k(n) by quadrature of the defining integral over (0, infinity).

    The outer variable is mapped to (0, 1) by u = -4 log(1 - x); the integrand then
    vanishes at x = 1 and adaptive bisection converges quickly.
    """
    if k < 2:
        raise ValueError("j_numeric_integral needs k >= 2")

    def f(x: np.ndarray) -> np.ndarray:
        return _outer_integrand(x, k, n)

    rough, _ = _gk15(f, 0.0, 1.0)
    value, err, ok = _adaptive(f, 0.0, 1.0, rel_tol * abs(rough) * 0.1)
    if not ok:
        raise ArithmeticError(f"quadrature did not converge: estimate {value}, error {err}")
    return NumericEstimate(value, err, "gauss-kronrod bisection")


# --------------------------------------------------------------------------- #
# Export
# --------------------------------------------------------------------------- #


def _frac_text(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def tables_to_csv(tables: Sequence[JTable]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "n", "value"])
    for table in tables:
        for n, v in enumerate(table.values):
            writer.writerow([table.k, n, _frac_text(v)])
    return buf.getvalue()


def tables_to_json(tables: Sequence[JTable]) -> str:
    payload = [{"k": t.k, "values": [_frac_text(v) for v in t.values]} for t in tables]
    return json.dumps(payload, sort_keys=True)


def eval_j(k: int, n: int, prec: int = 128) -> float:
    return float(eval_formal(j_formal(k, n), prec).real)
