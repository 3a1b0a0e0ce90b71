"""Truncated q-expansions with exact coefficients.

A :class:`QSeries` stores coefficients of q^(n/N) for n = 0 .. order-1, where q =
exp(2 pi i tau).  Coefficients may be ints, Fractions or FormalNumbers.  Every
operation tracks how far its output is actually known, so iterated integrals and
long products never hand back silently wrong tails.

Public constructors take ``order`` as a bound on the exponent measured in q: a
series built with ``order=40`` is known for all exponents below q^40.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from math import comb, factorial, gcd, lcm
from typing import Callable, Iterable, Sequence

from .apery import jtilde_value
from .numcore import FormalNumber, bernoulli_number, zeta_half

__all__ = [
    "QSeries",
    "Agreement",
    "series_arith",
    "eta",
    "eta_quotient",
    "theta",
    "eisenstein",
    "sigma_div",
    "tmod",
    "tmod_theta",
    "tmod_eta",
    "tmod_printed_eta",
    "wtilde2",
    "wtilde2_theta",
    "wtilde2_eta",
    "wtilde2_printed_eta",
    "fquartic",
    "fquartic_theta",
    "fquartic_eisenstein",
    "q_integrate",
    "theta_q",
    "bigE",
    "bigG",
    "bigG1_closed",
    "compose",
    "dG",
    "dG11",
    "phi1",
    "g1_phi1_difference",
    "hecke",
    "verify_w2",
    "verify_w4",
    "verify_w6",
    "wtilde_series",
    "cprime_formula",
    "cprime_check",
    "cprime_fit",
    "theta_hypergeom_check",
]

Coeff = object  # int | Fraction | FormalNumber


def _is_zero(c: Coeff) -> bool:
    return not c


def _inverse(c: Coeff) -> Coeff:
    if isinstance(c, int):
        return Fraction(1, c)
    if isinstance(c, Fraction):
        return 1 / c
    if isinstance(c, FormalNumber):
        return FormalNumber.rational(1) / c
    raise TypeError(f"cannot invert {type(c).__name__}")


def _ring_tag(coeffs: Iterable[Coeff]) -> str:
    return "formal" if any(isinstance(c, FormalNumber) for c in coeffs) else "rational"


class QSeries:
    """sum_{n < order} coeffs[n] q^(n/N), known exactly up to (not including) q^(order/N)."""

    __slots__ = ("N", "coeffs")

    def __init__(self, N: int, coeffs: Sequence[Coeff]) -> None:
        if N < 1:
            raise ValueError("denominator N must be positive")
        if not coeffs:
            raise ValueError("a series needs at least one known coefficient")
        self.N = N
        self.coeffs = tuple(coeffs)

    # -- basic properties -----------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def q_order(self) -> Fraction:
        """Exponent (in q) below which the series is known."""
        return Fraction(self.order, self.N)

    @property
    def ring_tag(self) -> str:
        return _ring_tag(self.coeffs)

    @property
    def valuation(self) -> int:
        """Index of the first nonzero coefficient (``order`` if none is known)."""
        for i, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return i
        return self.order

    def coefficient(self, exponent: Fraction | int) -> Coeff:
        e = Fraction(exponent) * self.N
        if e.denominator != 1:
            return 0
        n = e.numerator
        if n < 0:
            return 0
        if n >= self.order:
            raise IndexError(f"q^{exponent} lies beyond the known order q^{self.q_order}")
        return self.coeffs[n]

    def nonzero_terms(self) -> list[tuple[Fraction, Coeff]]:
        return [(Fraction(n, self.N), c) for n, c in enumerate(self.coeffs) if not _is_zero(c)]

    # -- constructors -----------------------------------------------------------
    @classmethod
    def constant(cls, c: Coeff, order: int, N: int = 1) -> "QSeries":
        return cls(N, [c] + [0] * (order - 1))

    @classmethod
    def monomial(cls, exponent: Fraction | int, c: Coeff, q_order: Fraction | int) -> "QSeries":
        e = Fraction(exponent)
        N = lcm(e.denominator, Fraction(q_order).denominator)
        length = int(Fraction(q_order) * N)
        coeffs: list[Coeff] = [0] * length
        if e * N < length:
            coeffs[int(e * N)] = c
        return cls(N, coeffs)

    # -- grid handling ----------------------------------------------------------
    def refine(self, N2: int) -> "QSeries":
        if N2 % self.N:
            raise ValueError(f"{N2} is not a multiple of {self.N}")
        step = N2 // self.N
        if step == 1:
            return self
        out: list[Coeff] = [0] * (self.order * step)
        for n, c in enumerate(self.coeffs):
            out[n * step] = c
        # every new slot lies below order/N, so the in-between slots are known zeros
        return QSeries(N2, out)

    def reduce(self) -> "QSeries":
        """Use the coarsest exponent grid that still holds every nonzero term."""
        g = self.N
        for n, c in enumerate(self.coeffs):
            if not _is_zero(c):
                g = gcd(g, n)
                if g == 1:
                    return self
        if g == 1 or self.order < g:
            return self
        # only whole coarse steps are known; a partial step may hide fine-grid terms
        length = self.order // g
        return QSeries(self.N // g, [self.coeffs[i * g] for i in range(length)])

    def _aligned(self, other: "QSeries") -> tuple["QSeries", "QSeries"]:
        N = lcm(self.N, other.N)
        return self.refine(N), other.refine(N)

    def truncate(self, q_order: Fraction | int) -> "QSeries":
        length = Fraction(q_order) * self.N
        n = min(self.order, -(-length.numerator // length.denominator))
        if n < 1:
            raise ValueError("truncation would leave no known coefficient")
        return QSeries(self.N, self.coeffs[:n])

    # -- ring operations --------------------------------------------------------
    def __add__(self, other: object) -> "QSeries":
        if not isinstance(other, QSeries):
            other = QSeries.constant(other, self.order, self.N)
        a, b = self._aligned(other)
        n = min(a.order, b.order)
        return QSeries(a.N, [a.coeffs[i] + b.coeffs[i] for i in range(n)]).reduce()

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries(self.N, [-c for c in self.coeffs])

    def __sub__(self, other: object) -> "QSeries":
        if not isinstance(other, QSeries):
            other = QSeries.constant(other, self.order, self.N)
        return self + (-other)

    def __rsub__(self, other: object) -> "QSeries":
        return (-self) + other

    def scale(self, c: Coeff) -> "QSeries":
        return QSeries(self.N, [c * x if x else 0 for x in self.coeffs])

    def __mul__(self, other: object) -> "QSeries":
        if not isinstance(other, QSeries):
            return self.scale(other)
        a, b = self._aligned(other)
        va, vb = a.valuation, b.valuation
        n = min(a.order + vb, b.order + va)
        out: list[Coeff] = [0] * n
        b_terms = [(j, c) for j, c in enumerate(b.coeffs) if not _is_zero(c)]
        for i, x in enumerate(a.coeffs):
            if i >= n:
                break
            if _is_zero(x):
                continue
            for j, y in b_terms:
                k = i + j
                if k >= n:
                    break
                out[k] = out[k] + x * y
        return QSeries(a.N, out or [0]).reduce()

    def __rmul__(self, other: object) -> "QSeries":
        return self.scale(other)

    def inverse(self) -> "QSeries":
        a0 = self.coeffs[0]
        if _is_zero(a0):
            raise ZeroDivisionError("leading coefficient is not invertible")
        inv0 = _inverse(a0)
        terms = [(j, c) for j, c in enumerate(self.coeffs) if j and not _is_zero(c)]
        out: list[Coeff] = [inv0]
        for n in range(1, self.order):
            acc: Coeff = 0
            for j, c in terms:
                if j > n:
                    break
                if not _is_zero(out[n - j]):
                    acc = acc + c * out[n - j]
            out.append(-(acc * inv0) if acc else 0)
        return QSeries(self.N, out)

    def __truediv__(self, other: object) -> "QSeries":
        if not isinstance(other, QSeries):
            return self.scale(_inverse(other))
        a, b = self._aligned(other)
        v = b.valuation
        if v >= b.order:
            raise ZeroDivisionError("divisor is zero to its known order")
        if a.valuation < v:
            raise ValueError("quotient would have negative exponents")
        return (a.shift_index(-v) * b.shift_index(-v).inverse()).reduce()

    def __pow__(self, e: int) -> "QSeries":
        if e < 0:
            return self.inverse() ** (-e)
        result = QSeries.constant(1, self.order, self.N)
        base = self
        first = True
        while e:
            if e & 1:
                result = base if first else result * base
                first = False
            e >>= 1
            if e:
                base = base * base
        return result

    def shift_index(self, k: int) -> "QSeries":
        """Multiply by q^(k/N); negative k requires enough leading zeros."""
        if k >= 0:
            return QSeries(self.N, [0] * k + list(self.coeffs))
        if self.valuation < -k:
            raise ValueError("shift would create negative exponents")
        return QSeries(self.N, self.coeffs[-k:] or [0])

    def shift(self, exponent: Fraction | int) -> "QSeries":
        e = Fraction(exponent)
        N = lcm(self.N, e.denominator)
        s = self.refine(N)
        return s.shift_index(int(e * N)).reduce()

    def scale_tau(self, c: Fraction | int) -> "QSeries":
        """tau -> c tau, i.e. q^(n/N) -> q^(c n/N), for positive rational c."""
        c = Fraction(c)
        if c <= 0:
            raise ValueError("scale_tau needs a positive rational factor")
        a, b = c.numerator, c.denominator
        out: list[Coeff] = [0] * ((self.order - 1) * a + 1)
        for n, x in enumerate(self.coeffs):
            out[n * a] = x
        # known up to q^(c * order/N); pad the known zeros between the last stored term and that bound
        out.extend([0] * (a - 1))
        return QSeries(self.N * b, out).reduce()

    def translate(self, h: Fraction | int) -> "QSeries":
        """tau -> tau + h when every factor exp(2 pi i h n/N) is +-1."""
        h = Fraction(h)
        out = []
        for n, c in enumerate(self.coeffs):
            if _is_zero(c):
                out.append(c)
                continue
            turns = 2 * h * n / self.N
            if turns.denominator != 1:
                raise ValueError("translation would give non-real phases")
            out.append(-c if turns.numerator % 2 else c)
        return QSeries(self.N, out)

    # -- comparison / output ------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = self.reduce(), other.reduce()
        return a.N == b.N and a.coeffs == b.coeffs

    def __hash__(self) -> int:
        r = self.reduce()
        return hash((r.N, r.coeffs))

    def __repr__(self) -> str:
        shown = ", ".join(f"{c}*q^{e}" for e, c in self.nonzero_terms()[:6])
        return f"QSeries(N={self.N}, order={self.order}: {shown} ...)"

    def to_json(self) -> str:
        def enc(c: Coeff) -> object:
            if isinstance(c, FormalNumber):
                return c.to_json()
            f = Fraction(c)
            return f"{f.numerator}/{f.denominator}"

        return json.dumps({"N": self.N, "order": self.order, "coeffs": [enc(c) for c in self.coeffs]})


@dataclass(frozen=True)
class Agreement:
    """Outcome of comparing two series up to a common known order."""

    holds: bool
    compared_to: Fraction
    first_mismatch: Fraction | None = None
    lhs: object = None
    rhs: object = None

    def __bool__(self) -> bool:
        return self.holds


def agree(a: QSeries, b: QSeries, q_order: Fraction | int | None = None) -> Agreement:
    """Coefficient-wise comparison up to the smaller known order (or ``q_order``)."""
    x, y = a._aligned(b)
    n = min(x.order, y.order)
    if q_order is not None:
        need = Fraction(q_order) * x.N
        if need > n:
            raise ValueError(f"series are only known to q^{Fraction(n, x.N)}, asked for q^{q_order}")
        n = int(need)
    for i in range(n):
        if x.coeffs[i] != y.coeffs[i]:
            return Agreement(False, Fraction(n, x.N), Fraction(i, x.N), x.coeffs[i], y.coeffs[i])
    return Agreement(True, Fraction(n, x.N))


def series_arith(a: QSeries, b: object = None, op: str = "add") -> QSeries:
    """Dispatch for ``add``, ``mul``, ``inv``, ``pow`` and ``scale_tau``."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    if op == "pow":
        return a ** int(b)
    if op == "scale_tau":
        return a.scale_tau(b)
    raise ValueError(f"unknown op {op!r}")


# --------------------------------------------------------------------------- #
# Classical building blocks
# --------------------------------------------------------------------------- #


def _euler_product_powers(exps: dict[int, int], length: int) -> list[int]:
    """prod_m prod_{n>=1} (1 - x^{m n})^{e_m} as integer coefficients of x^0..x^{length-1}."""
    # log-derivative recurrence: if P = prod (1-x^{mn})^{e}, then
    # n p_n = -sum_{j=1}^{n} s_j p_{n-j} with s_j = sum_{m | j} e_m * m * sigma_1(j/m).
    s = [0] * length
    for m, e in exps.items():
        if not e:
            continue
        for j in range(m, length, m):
            t = j // m
            s[j] += e * m * _sigma_int(1, t)
    p = [0] * length
    p[0] = 1
    for n in range(1, length):
        acc = 0
        for j in range(1, n + 1):
            if s[j]:
                acc += s[j] * p[n - j]
        p[n] = -acc // n
    return p


def _sigma_int(k: int, n: int) -> int:
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def eta_quotient(exponents: dict[Fraction | int, int], order: Fraction | int) -> QSeries:
    """prod_m eta(m tau)^{e_m} for positive rational m, known below q^order.

    The q^(sum e_m m/24) prefactor must be a non-negative power.
    """
    ms = {Fraction(m): e for m, e in exponents.items() if e}
    lead = sum((m * e / 24 for m, e in ms.items()), Fraction(0))
    if lead < 0:
        raise ValueError("eta quotient has a pole at the cusp")
    # work in x = q^(1/D) where every m is an integer multiple of 1/D
    D = lcm(*[m.denominator for m in ms]) if ms else 1
    int_exps = {int(m * D): e for m, e in ms.items()}
    length = int(Fraction(order) * D - lead * D)
    if length < 1:
        raise ValueError("order too small for this eta quotient")
    # -(-x // 1) is ceiling; the product is needed for exponents below order - lead
    need = -(-(Fraction(order) - lead) * D // 1)
    p = _euler_product_powers(int_exps, int(need))
    series = QSeries(D, p)
    return series.shift(lead).truncate(order)


def eta(m: Fraction | int, order: Fraction | int) -> QSeries:
    """Dedekind eta(m tau) = q^(m/24) prod (1 - q^(m n))."""
    return eta_quotient({Fraction(m): 1}, order)


def theta(which: int, m: Fraction | int, order: Fraction | int) -> QSeries:
    """Jacobi theta_2, theta_3 or theta_4 at m*tau, as sums over n of q^(n^2/2)-type terms."""
    m = Fraction(m)
    order = Fraction(order)
    if which == 3 or which == 4:
        # q^(m n^2 / 2), exponent grid 1/(2*den)
        N = lcm(2 * m.denominator // gcd(m.numerator, 2), order.denominator)
        N = lcm(N, (m / 2).denominator)
        length = int(order * N)
        coeffs: list[int] = [0] * length
        n = 0
        while m * n * n / 2 < order:
            idx = int(m * n * n / 2 * N)
            mult = 1 if n == 0 else 2
            sign = (-1) ** n if which == 4 else 1
            coeffs[idx] += sign * mult
            n += 1
        return QSeries(N, coeffs).reduce()
    if which == 2:
        N = lcm((m / 8).denominator, order.denominator)
        length = int(order * N)
        coeffs = [0] * length
        n = 0
        # (n + 1/2)^2 / 2 = (2n+1)^2 / 8, doubled for the negative indices
        while m * (2 * n + 1) ** 2 / 8 < order:
            coeffs[int(m * (2 * n + 1) ** 2 / 8 * N)] += 2
            n += 1
        return QSeries(N, coeffs).reduce()
    raise ValueError("theta index must be 2, 3 or 4")


def sigma_div(k: int, n: int) -> Fraction:
    """sum_{d | n} d^k, exact for negative k as well."""
    if n < 1:
        raise ValueError("sigma_div needs n >= 1")
    return sum((Fraction(d) ** k for d in range(1, n + 1) if n % d == 0), Fraction(0))


def eisenstein(k: int, m: Fraction | int, order: Fraction | int) -> QSeries:
    """E_k(m tau) = 1 + 2/zeta(1-k) sum sigma_{k-1}(n) q^(m n), with zeta(1-k) = -B_k/k."""
    if k < 4 or k % 2:
        raise ValueError("eisenstein needs even k >= 4")
    const = 2 / (-bernoulli_number(k) / k)
    m = Fraction(m)
    order = Fraction(order)
    base_order = order / m
    n_max = -(-base_order.numerator // base_order.denominator)
    coeffs: list[Coeff] = [1] + [const * sigma_div(k - 1, n) for n in range(1, n_max)]
    base = QSeries(1, [c if not isinstance(c, Fraction) or c.denominator != 1 else int(c) for c in coeffs])
    return base.scale_tau(m).truncate(order) if m != 1 else base.truncate(order)


# --------------------------------------------------------------------------- #
# The modular objects
# --------------------------------------------------------------------------- #


def tmod_theta(order: Fraction | int) -> QSeries:
    """t = -theta_2^4 / theta_4^4."""
    return -(theta(2, 1, order) ** 4) / theta(4, 1, order) ** 4


def tmod_eta(order: Fraction | int) -> QSeries:
    """t = -16 eta(2 tau)^8 / eta(tau/2)^8, the eta form valid with q = exp(2 pi i tau)."""
    return eta_quotient({2: 8, Fraction(1, 2): -8}, order).scale(-16)


def tmod_printed_eta(order: Fraction | int) -> QSeries:
    """eta(tau)^8 eta(4 tau)^16 / eta(2 tau)^24 evaluated at (tau + 1)/2.

    The quotient as printed only has integer powers of q and leading coefficient 1;
    after tau -> (tau+1)/2 it equals t/16 (see :func:`tmod`).
    """
    return eta_quotient({1: 8, 4: 16, 2: -24}, 2 * Fraction(order)).scale_tau(Fraction(1, 2)).translate(1).truncate(order)


def tmod(order: Fraction | int) -> QSeries:
    return _tmod_cached(Fraction(order))


@lru_cache(maxsize=None)
def _tmod_cached(order: Fraction) -> QSeries:
    """The Hauptmodul t(tau), computed by two independent routes that must agree."""
    a = tmod_theta(order)
    b = tmod_eta(order)
    check = agree(a, b)
    if not check:
        raise ArithmeticError(f"theta and eta constructions of t differ at q^{check.first_mismatch}")
    return a


def wtilde2_theta(order: Fraction | int) -> QSeries:
    """theta_4^4 / theta_3^2."""
    return theta(4, 1, order) ** 4 / theta(3, 1, order) ** 2


def wtilde2_eta(order: Fraction | int) -> QSeries:
    """eta(tau/2)^12 eta(2 tau)^4 / eta(tau)^14."""
    return eta_quotient({Fraction(1, 2): 12, 2: 4, 1: -14}, order)


def wtilde2_printed_eta(order: Fraction | int) -> QSeries:
    """eta(2 tau)^22 / (eta(tau)^12 eta(4 tau)^8) evaluated at (tau + 1)/2."""
    return eta_quotient({2: 22, 1: -12, 4: -8}, 2 * Fraction(order)).scale_tau(Fraction(1, 2)).translate(1).truncate(order)


def wtilde2(order: Fraction | int) -> QSeries:
    return _wtilde2_cached(Fraction(order))


@lru_cache(maxsize=None)
def _wtilde2_cached(order: Fraction) -> QSeries:
    """The weight-one form w_2 / J_2(0) with constant term 1."""
    a = wtilde2_theta(order)
    check = agree(a, wtilde2_eta(order))
    if not check:
        raise ArithmeticError(f"theta and eta constructions of w~2 differ at q^{check.first_mismatch}")
    return a


def fquartic_theta(order: Fraction | int) -> QSeries:
    return theta(2, 1, order) ** 4 * theta(4, 1, order) ** 4


def fquartic_eisenstein(order: Fraction | int) -> QSeries:
    combo = eisenstein(4, Fraction(1, 2), order) - eisenstein(4, 1, order).scale(17) \
        + eisenstein(4, 2, order).scale(16)
    return combo.scale(Fraction(1, 15))


def fquartic(order: Fraction | int) -> QSeries:
    return _fquartic_cached(Fraction(order))


@lru_cache(maxsize=None)
def _fquartic_cached(order: Fraction) -> QSeries:
    """f = theta_2^4 theta_4^4, checked against the Eisenstein combination."""
    a = fquartic_theta(order)
    check = agree(a, fquartic_eisenstein(order))
    if not check:
        raise ArithmeticError(f"theta and Eisenstein constructions of f differ at q^{check.first_mismatch}")
    return a


def q_integrate(g: QSeries) -> QSeries:
    """integral_0^q g dq/q, i.e. c q^(n/N) -> (N/n) c q^(n/N)."""
    if not _is_zero(g.coeffs[0]):
        raise ValueError("q_integrate needs a series without constant term")
    return QSeries(g.N, [0] + [c * Fraction(g.N, n) if c else 0 for n, c in enumerate(g.coeffs) if n])


def theta_q(g: QSeries) -> QSeries:
    """q d/dq, i.e. c q^(n/N) -> (n/N) c q^(n/N)."""
    return QSeries(g.N, [c * Fraction(n, g.N) if c else 0 for n, c in enumerate(g.coeffs)])


def _iterate(g: QSeries, times: int) -> QSeries:
    for _ in range(times):
        g = q_integrate(g)
    return g


def bigE(k: int, order: Fraction | int) -> QSeries:
    """The 2k-fold q-integral of f^k."""
    if k < 1:
        raise ValueError("bigE needs k >= 1")
    return _bigE_cached(k, Fraction(order))


@lru_cache(maxsize=None)
def _bigE_cached(k: int, order: Fraction) -> QSeries:
    return _iterate(fquartic(order) ** k, 2 * k)


def bigG(k: int, order: Fraction | int) -> QSeries:
    """The (4k-1)-fold q-integral of f^k."""
    if k < 1:
        raise ValueError("bigG needs k >= 1")
    return _iterate(fquartic(order) ** k, 4 * k - 1)


def bigG1_closed(order: Fraction | int) -> QSeries:
    """16 (8 sum sigma_-3(n) q^(n/2) - 17 sum sigma_-3(n) q^n + 2 sum sigma_-3(n) q^(2n))."""
    order = Fraction(order)
    length = int(order * 2)
    coeffs: list[Coeff] = [Fraction(0)] * length
    for n in range(1, length):
        coeffs[n] += 128 * sigma_div(-3, n)
    for n in range(1, length):
        if 2 * n < length:
            coeffs[2 * n] -= 272 * sigma_div(-3, n)
        if 4 * n < length:
            coeffs[4 * n] += 32 * sigma_div(-3, n)
    return QSeries(2, coeffs)


def compose(outer: Sequence[Coeff] | Callable[[int], Coeff], inner: QSeries) -> QSeries:
    """sum_n a_n inner^n by Horner's rule, to the order to which ``inner`` is known.

    ``outer`` is either a sequence (missing entries count as unknown, so it must be
    long enough) or a function n -> a_n.
    """
    if not _is_zero(inner.coeffs[0]):
        raise ValueError("compose needs an inner series without constant term")
    v = inner.valuation
    if v >= inner.order:
        n_terms = 1
    else:
        n_terms = -(-inner.order // v)  # powers beyond this vanish to the known order
    get = outer if callable(outer) else None
    if get is None:
        seq = list(outer)
        if len(seq) < n_terms:
            # a short sequence is fine only if it is a polynomial, zero beyond its end
            seq = seq + [0] * (n_terms - len(seq))

        def get(n: int) -> Coeff:
            return seq[n]
    acc = QSeries.constant(get(n_terms - 1), inner.order, inner.N)
    for n in range(n_terms - 2, -1, -1):
        acc = acc * inner + QSeries.constant(get(n), inner.order, inner.N)
    return acc.truncate(inner.q_order)


def wtilde_series(k: int, order: Fraction | int) -> QSeries:
    """sum_n J~_k(n) t^n as a q-series."""
    return _wtilde_cached(k, Fraction(order))


@lru_cache(maxsize=None)
def _wtilde_cached(k: int, order: Fraction) -> QSeries:
    t = tmod(order)
    return compose(lambda n: jtilde_value(k, n), t)


# --------------------------------------------------------------------------- #
# Differential Eisenstein series and Hecke operators
# --------------------------------------------------------------------------- #


def _dg_prefactor(k: int) -> FormalNumber:
    """(-1)^k (2k)! / (2 pi)^(2k) as a multiple of pi^(-2k)."""
    return FormalNumber.pi2(-k, Fraction((-1) ** k * factorial(2 * k), 4**k))


def dG(k: int, order: int) -> QSeries:
    """Differential Eisenstein series of weight -2k through its Lambert expansion."""
    if k < 1:
        raise ValueError("dG needs k >= 1")
    pre = _dg_prefactor(k)
    coeffs: list[Coeff] = [pre * FormalNumber.zeta(2 * k + 1)]
    for n in range(1, order):
        coeffs.append(pre * (2 * sigma_div(-2 * k - 1, n)))
    return QSeries(1, coeffs)


def dG11(k: int, order: int) -> QSeries:
    """(1 + 4^k) dG(tau) - 4^k dG(tau/2) - dG(2 tau)."""
    base = dG(k, 2 * order)
    four = 4**k
    a = base.truncate(order).scale(1 + four)
    b = base.scale_tau(Fraction(1, 2)).truncate(order).scale(four)
    c = base.scale_tau(2).truncate(order)
    return a - b - c


def phi1(order: int) -> QSeries:
    """-8 pi^2 (7 dG(1) + 2 dG11(1))."""
    combo = dG(1, 2 * order).truncate(order).scale(7) + dG11(1, order).scale(2)
    return combo.scale(FormalNumber.pi2(1, -8))


def g1_phi1_difference(order: int) -> QSeries:
    """G_1 - (phi_1 + 56 zeta(3)), coefficient by coefficient (informational)."""
    g1 = bigG1_closed(order)
    g1f = QSeries(g1.N, [FormalNumber.rational(c) for c in g1.coeffs])
    rhs = phi1(order) + FormalNumber.zeta(3, 56)
    return g1f - rhs


def hecke(g: QSeries, n: int, weight: int, order: int | None = None) -> QSeries:
    """T(n) on a level-one series of weight ``weight`` = -k <= 0.

    The coefficient of q^l is sum_{d | (n, l)} d^(-k-1) lambda(n l / d^2).
    """
    if g.N != 1:
        raise ValueError("hecke needs a series in integer powers of q")
    if weight > 0:
        raise ValueError("hecke is set up for weight <= 0")
    if n < 1:
        raise ValueError("hecke index must be positive")
    k = -weight
    available = -(-g.order // n)
    if order is None:
        order = available
    if order > available:
        raise ValueError(f"input known to q^{g.order}, enough for order {available} only")
    out: list[Coeff] = []
    for l in range(order):
        acc: Coeff = 0
        common = gcd(n, l) if l else n
        for d in range(1, common + 1):
            if common % d:
                continue
            acc = acc + g.coeffs[n * l // (d * d)] * Fraction(1, d ** (k + 1))
        out.append(acc)
    return QSeries(1, out)


# --------------------------------------------------------------------------- #
# Identity checks
# --------------------------------------------------------------------------- #


def verify_w2(order: Fraction | int) -> Agreement:
    """sum J~_2(n) t^n equals the weight-one form w~2."""
    return agree(wtilde_series(2, order), wtilde2(order), order)


def verify_w4(order: Fraction | int) -> Agreement:
    """sum J~_4(n) t^n equals -(1/4) w~2 E_1."""
    rhs = (wtilde2(order) * bigE(1, order)).scale(Fraction(-1, 4))
    return agree(wtilde_series(4, order), rhs, order)


def verify_w6(order: Fraction | int) -> Agreement:
    """sum J~_6(n) t^n equals (1/16) w~2 E_2."""
    rhs = (wtilde2(order) * bigE(2, order)).scale(Fraction(1, 16))
    return agree(wtilde_series(6, order), rhs, order)


def _ratio(a: int, b: int) -> FormalNumber:
    """J_a(0) / J_b(0) for even a, b (a ratio of pi powers)."""
    return zeta_half(a) * (a - 1) / (zeta_half(b) * (b - 1))


def cprime_formula(k: int, j: int) -> FormalNumber:
    """Closed forms for c'_{k,j}, j = 1..4, and c'_{k,k} = 1.

    For j = 2 this is 4 J_{2k-2}(0)/J_2(0); see :func:`cprime_fit`, which recovers
    exactly these values from the leading coefficients.
    """
    if not 1 <= j <= k:
        raise ValueError("c'_{k,j} needs 1 <= j <= k")
    if j == k:
        return FormalNumber.rational(1)
    r = lambda m: _ratio(m, 2) if m >= 2 else FormalNumber()  # noqa: E731
    if j == 1:
        return r(2 * k)
    if j == 2:
        return r(2 * k - 2) * 4
    if j == 3:
        return (r(2 * k - 2) * 117 + r(2 * k - 4) * 162) / 8
    if j == 4:
        return (r(2 * k - 2) * (-695) + r(2 * k - 4) * 2794 + r(2 * k - 6) * 1024) / 9
    raise ValueError("no printed formula for this c'")


def _w_normalized_rhs(k: int, cs: Sequence[FormalNumber], order: Fraction | int) -> QSeries:
    """w~2 { J_{2k+2}(0)/J_2(0) + sum_j (-1/4)^j c_j E_j }."""
    inner: QSeries = QSeries.constant(_ratio(2 * k + 2, 2), int(Fraction(order) * 2), 2)
    for j, c in enumerate(cs, start=1):
        inner = inner + bigE(j, order).scale(Fraction(-1, 4) ** j * c)
    return wtilde2(order) * inner


def _w_normalized_lhs(k: int, order: Fraction | int) -> QSeries:
    """w_{2k+2} / J_2(0) = sum_j J_{2k+2-2j}(0)/J_2(0) w~_{2j+2}."""
    acc: QSeries | None = None
    for j in range(k + 1):
        term = wtilde_series(2 * j + 2, order).scale(_ratio(2 * k + 2 - 2 * j, 2))
        acc = term if acc is None else acc + term
    return acc


def cprime_check(k: int, order: Fraction | int) -> Agreement:
    """Test the W_j expansion of w_{2k} with the closed-form c'_{k-1,j} substituted.

    k = 2 is the w_4 identity and k = 3 the w_6 identity.
    """
    if not 2 <= k <= 5:
        raise ValueError("cprime_check covers k = 2..5")
    m = k - 1
    cs = [cprime_formula(m, j) for j in range(1, m + 1)]
    return agree(_w_normalized_lhs(m, order), _w_normalized_rhs(m, cs, order), order)


def cprime_fit(k: int, order: Fraction | int = None) -> list[FormalNumber]:
    """Solve for c'_{k,1..k-1} from the coefficients of q^(1/2), ..., q^((k-1)/2).

    With c'_{k,k} = 1 fixed, the coefficient of q^(l/2) is linear in the unknowns
    and its system is triangular (E_j starts at q^(j/2)), so it solves exactly.
    """
    if order is None:
        order = Fraction(k + 1, 2)
    lhs = _w_normalized_lhs(k, order)
    w2 = wtilde2(order)
    es = [w2 * bigE(j, order) for j in range(1, k + 1)]
    base = w2.scale(_ratio(2 * k + 2, 2))
    cs: list[FormalNumber] = [FormalNumber()] * (k - 1) + [FormalNumber.rational(1)]
    for l in range(1, k):
        e = Fraction(l, 2)
        target = lhs.coefficient(e) - base.coefficient(e)
        for j in range(1, k + 1):
            if j != l:
                target = target - es[j - 1].coefficient(e) * (Fraction(-1, 4) ** j) * cs[j - 1]
        cs[l - 1] = target / (es[l - 1].coefficient(e) * Fraction(-1, 4) ** l)
    return cs


def theta_hypergeom_check(order: Fraction | int) -> Agreement:
    """2F1(1/2,1/2;1; theta_2^4/theta_3^4) equals theta_3^2."""
    th3 = theta(3, 1, order)
    z = theta(2, 1, order) ** 4 / th3**4

    def coeff(n: int) -> Fraction:
        c = Fraction(comb(2 * n, n), 4**n)
        return c * c

    return agree(compose(coeff, z), th3**2, order)
