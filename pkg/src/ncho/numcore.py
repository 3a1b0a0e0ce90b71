"""Exact rationals, the formal-constant ring and numeric evaluation of its constants.

Every exact quantity in the package is either a :class:`fractions.Fraction` or a
:class:`FormalNumber`, a finite rational combination of monomials in pi^2 and the
odd zeta values zeta(3), zeta(5), ...  Even zeta values are rewritten eagerly as
rational multiples of powers of pi^2, so identities between such numbers reduce to
comparisons of rational coefficients.
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Union

import mpmath

__all__ = [
    "Rat",
    "ConstMonomial",
    "FormalNumber",
    "BigComplex",
    "bernoulli_number",
    "zeta_half",
    "zeta_int",
    "formal_arith",
    "eval_formal",
    "zeta_odd_value",
    "pi_value",
    "as_formal",
]

Rat = Fraction
Scalar = Union[int, Fraction]


# --------------------------------------------------------------------------- #
# Bernoulli numbers
# --------------------------------------------------------------------------- #

_bernoulli_cache: list[Fraction] = [Fraction(1)]
_bernoulli_lock = threading.Lock()


def bernoulli_number(n: int) -> Fraction:
    """Return B_n with the convention B_1 = -1/2.

    Values are produced by the recurrence sum_{j<=n} C(n+1, j) B_j = 0 and kept in
    a module-level table, so repeated calls are cheap.
    """
    if n < 0:
        raise ValueError("bernoulli_number needs n >= 0")
    if n >= 3 and n % 2 == 1:
        return Fraction(0)
    with _bernoulli_lock:
        table = _bernoulli_cache
        while len(table) <= n:
            m = len(table)
            if m >= 3 and m % 2 == 1:
                table.append(Fraction(0))
                continue
            acc = sum((comb(m + 1, j) * table[j] for j in range(m) if table[j]), Fraction(0))
            table.append(-acc / (m + 1))
        return table[n]


# --------------------------------------------------------------------------- #
# The formal-constant ring
# --------------------------------------------------------------------------- #


@dataclass(frozen=True, order=True)
class ConstMonomial:
    """pi^(2*pi2_exponent) * prod zeta(m)^e, stored canonically.

    ``zeta_exponents`` is a sorted tuple of ``(m, e)`` pairs with odd m >= 3 and
    e >= 1, so two monomials are equal exactly when their fields are equal.
    """

    pi2_exponent: int = 0
    zeta_exponents: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        for m, e in self.zeta_exponents:
            if m < 3 or m % 2 == 0 or e < 1:
                raise ValueError(f"bad zeta factor zeta({m})^{e}")
        if list(self.zeta_exponents) != sorted(self.zeta_exponents):
            raise ValueError("zeta factors must be sorted")

    @property
    def is_one(self) -> bool:
        return self.pi2_exponent == 0 and not self.zeta_exponents

    @property
    def weight(self) -> int:
        return 2 * self.pi2_exponent + sum(m * e for m, e in self.zeta_exponents)

    def __mul__(self, other: "ConstMonomial") -> "ConstMonomial":
        zetas = dict(self.zeta_exponents)
        for m, e in other.zeta_exponents:
            zetas[m] = zetas.get(m, 0) + e
        return ConstMonomial(self.pi2_exponent + other.pi2_exponent, tuple(sorted(zetas.items())))

    def divide(self, other: "ConstMonomial") -> "ConstMonomial":
        zetas = dict(self.zeta_exponents)
        for m, e in other.zeta_exponents:
            left = zetas.get(m, 0) - e
            if left < 0:
                raise ValueError(f"zeta({m}) cannot appear with a negative exponent")
            if left:
                zetas[m] = left
            else:
                zetas.pop(m, None)
        return ConstMonomial(self.pi2_exponent - other.pi2_exponent, tuple(sorted(zetas.items())))

    def label(self) -> str:
        parts = []
        if self.pi2_exponent:
            parts.append("pi^2" if self.pi2_exponent == 1 else f"pi^{2 * self.pi2_exponent}")
        for m, e in self.zeta_exponents:
            parts.append(f"zeta({m})" if e == 1 else f"zeta({m})^{e}")
        return "*".join(parts) or "1"


ONE = ConstMonomial()


class FormalNumber:
    """Immutable rational linear combination of :class:`ConstMonomial` terms.

    Plain ints and Fractions are accepted wherever a FormalNumber is, so q-series
    code can mix both coefficient rings freely.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[ConstMonomial, Scalar] | None = None) -> None:
        clean: dict[ConstMonomial, Fraction] = {}
        if terms:
            for mono, c in terms.items():
                if c:
                    clean[mono] = Fraction(c)
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def _raw(cls, terms: dict[ConstMonomial, Fraction]) -> "FormalNumber":
        out = object.__new__(cls)
        out._terms = terms
        out._hash = None
        return out

    @classmethod
    def rational(cls, c: Scalar) -> "FormalNumber":
        return cls({ONE: c})

    @classmethod
    def pi2(cls, exponent: int = 1, coeff: Scalar = 1) -> "FormalNumber":
        """coeff * pi^(2*exponent)."""
        return cls({ConstMonomial(exponent): coeff})

    @classmethod
    def zeta(cls, m: int, coeff: Scalar = 1) -> "FormalNumber":
        """coeff * zeta(m) for odd m >= 3."""
        return cls({ConstMonomial(0, ((m, 1),)): coeff})

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict[ConstMonomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[ConstMonomial, Fraction]]:
        return iter(sorted(self._terms.items()))

    def coeff(self, mono: ConstMonomial = ONE) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(m.is_one for m in self._terms)

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeff(ONE)

    def single_term(self) -> tuple[ConstMonomial, Fraction]:
        if len(self._terms) != 1:
            raise ValueError(f"expected exactly one term, got {len(self._terms)}")
        return next(iter(self._terms.items()))

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: object) -> "FormalNumber":
        o = as_formal(other) if not isinstance(other, FormalNumber) else other
        if o is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for mono, c in o._terms.items():
            v = out.get(mono, 0) + c
            if v:
                out[mono] = v
            else:
                out.pop(mono, None)
        return FormalNumber._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "FormalNumber":
        return FormalNumber._raw({m: -c for m, c in self._terms.items()})

    def __pos__(self) -> "FormalNumber":
        return self

    def __sub__(self, other: object) -> "FormalNumber":
        o = as_formal(other) if not isinstance(other, FormalNumber) else other
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "FormalNumber":
        return (-self) + other

    def __mul__(self, other: object) -> "FormalNumber":
        if isinstance(other, (int, Fraction)):
            if not other:
                return FormalNumber._raw({})
            return FormalNumber._raw({m: c * other for m, c in self._terms.items()})
        if not isinstance(other, FormalNumber):
            return NotImplemented
        out: dict[ConstMonomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 * m2
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return FormalNumber._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "FormalNumber":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of a FormalNumber by zero")
            return FormalNumber._raw({m: c / other for m, c in self._terms.items()})
        if not isinstance(other, FormalNumber):
            return NotImplemented
        mono, c = other.single_term()
        return FormalNumber._raw({m.divide(mono): v / c for m, v in self._terms.items()})

    def __pow__(self, e: int) -> "FormalNumber":
        if e < 0:
            return FormalNumber.rational(1) / (self ** (-e))
        out = FormalNumber.rational(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # -- comparison / display ------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, FormalNumber):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            if not other:
                return not self._terms
            return self._terms == {ONE: Fraction(other)}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        return f"FormalNumber({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        bits = []
        for mono, c in self.items():
            bits.append(str(c) if mono.is_one else f"({c})*{mono.label()}")
        return " + ".join(bits)

    def to_json(self) -> list[dict[str, object]]:
        """Stable JSON form: one object per term, ordered by monomial."""
        return [
            {"coeff": f"{c.numerator}/{c.denominator}", "pi2": mono.pi2_exponent,
             "zeta": [[m, e] for m, e in mono.zeta_exponents]}
            for mono, c in self.items()
        ]


def as_formal(x: object) -> FormalNumber:
    if isinstance(x, FormalNumber):
        return x
    if isinstance(x, (int, Fraction)):
        return FormalNumber.rational(x)
    return NotImplemented  # type: ignore[return-value]


def zeta_int(k: int) -> FormalNumber:
    """Riemann zeta(k) for k >= 2, with even values written through pi^2."""
    if k < 2:
        raise ValueError("zeta_int needs k >= 2")
    if k % 2 == 0:
        # zeta(2m) = (-1)^(m+1) B_{2m} (2 pi)^{2m} / (2 (2m)!)
        m = k // 2
        c = (-1) ** (m + 1) * bernoulli_number(k) * Fraction(2**k, 2 * _factorial(k))
        return FormalNumber.pi2(m, c)
    return FormalNumber.zeta(k)


def zeta_half(k: int) -> FormalNumber:
    """Hurwitz zeta(k, 1/2) = (2^k - 1) zeta(k) in the canonical constant basis."""
    if k < 2:
        raise ValueError("zeta_half needs k >= 2")
    return zeta_int(k) * (2**k - 1)


def formal_arith(a: FormalNumber | Scalar, b: FormalNumber | Scalar, op: str) -> FormalNumber:
    """Dispatch one of ``add``, ``sub``, ``mul``, ``div_by_monomial``."""
    fa, fb = as_formal(a), as_formal(b)
    if op == "add":
        return fa + fb
    if op == "sub":
        return fa - fb
    if op == "mul":
        return fa * fb
    if op == "div_by_monomial":
        if len(fb.terms) != 1:
            raise ValueError("div_by_monomial needs a single-term divisor")
        return fa / fb
    raise ValueError(f"unknown op {op!r}")


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


# --------------------------------------------------------------------------- #
# Numeric evaluation
# --------------------------------------------------------------------------- #


class BigComplex:
    """Complex number carried at a fixed binary precision (at least 64 bits).

    Arithmetic between two values runs at the larger of their precisions.
    """

    __slots__ = ("value", "prec")

    def __init__(self, value: object, prec: int) -> None:
        if prec < 64:
            raise ValueError("BigComplex needs at least 64 bits")
        with mpmath.workprec(prec):
            self.value = mpmath.mpc(value)
        self.prec = prec

    @property
    def real(self) -> mpmath.mpf:
        return self.value.real

    @property
    def imag(self) -> mpmath.mpf:
        return self.value.imag

    def _binary(self, other: object, fn) -> "BigComplex":
        if isinstance(other, BigComplex):
            prec, rhs = max(self.prec, other.prec), other.value
        else:
            prec, rhs = self.prec, other
        with mpmath.workprec(prec):
            return BigComplex(fn(self.value, mpmath.mpmathify(rhs)), prec)

    def __add__(self, other: object) -> "BigComplex":
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other: object) -> "BigComplex":
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other: object) -> "BigComplex":
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other: object) -> "BigComplex":
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "BigComplex":
        return self._binary(other, lambda a, b: a / b)

    def __neg__(self) -> "BigComplex":
        return BigComplex(-self.value, self.prec)

    def __abs__(self) -> mpmath.mpf:
        with mpmath.workprec(self.prec):
            return abs(self.value)

    def __complex__(self) -> complex:
        return complex(self.value)

    def __float__(self) -> float:
        if self.value.imag:
            raise TypeError("value has a nonzero imaginary part")
        return float(self.value.real)

    def __repr__(self) -> str:
        return f"BigComplex({mpmath.nstr(self.value, 20)}, prec={self.prec})"


_zeta_cache: dict[tuple[int, int], mpmath.mpf] = {}
_zeta_lock = threading.Lock()


def _cache_file(prec: int) -> Path | None:
    root = os.environ.get("NCHO_CACHE_DIR")
    if not root:
        return None
    return Path(root) / f"zeta_odd_{prec}.json"


def _load_disk_cache(prec: int) -> None:
    path = _cache_file(prec)
    if path is None or not path.exists():
        return
    try:
        stored = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError):
        return
    with mpmath.workprec(prec):
        for key, text in stored.items():
            _zeta_cache.setdefault((int(key), prec), mpmath.mpf(text))


def _store_disk_cache(prec: int) -> None:
    path = _cache_file(prec)
    if path is None:
        return
    with mpmath.workprec(prec):
        payload = {str(m): mpmath.nstr(v, int(prec * 0.302) + 5)
                   for (m, p), v in sorted(_zeta_cache.items()) if p == prec}
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
    except OSError:
        pass


def _euler_maclaurin_zeta(s: int, prec: int) -> mpmath.mpf:
    """zeta(s) for integer s >= 2 by Euler-Maclaurin summation.

    Sum the first N-1 terms directly, then add the integral, the half term and
    Bernoulli corrections until the correction drops below 2^-(prec+8) relative
    to the leading part.  The correction terms first shrink geometrically (ratio
    about (s+2j)^2 / (2 pi N)^2), so N of roughly prec/4 is plenty.
    """
    work = prec + 24
    with mpmath.workprec(work):
        n_direct = max(16, prec // 4)
        big_n = mpmath.mpf(n_direct)
        head = mpmath.fsum(mpmath.mpf(n) ** (-s) for n in range(1, n_direct))
        tail = big_n ** (1 - s) / (s - 1) + big_n ** (-s) / 2
        eps = mpmath.mpf(2) ** (-(prec + 8))
        rising = mpmath.mpf(s)  # s (s+1) ... (s+2j-2)
        power = big_n ** (-s - 1)
        j = 1
        while True:
            b = bernoulli_number(2 * j)
            term = mpmath.mpf(b.numerator) / b.denominator / mpmath.factorial(2 * j) * rising * power
            tail += term
            if abs(term) < eps:
                break
            if j > 4 * n_direct:
                raise ArithmeticError("Euler-Maclaurin correction failed to settle")
            rising *= (s + 2 * j - 1) * (s + 2 * j)
            power /= big_n * big_n
            j += 1
        return +(head + tail)


def zeta_odd_value(m: int, prec: int) -> mpmath.mpf:
    """Numeric zeta(m) at ``prec`` bits, memoised per (m, prec)."""
    key = (m, prec)
    with _zeta_lock:
        if key not in _zeta_cache:
            _load_disk_cache(prec)
        if key in _zeta_cache:
            return _zeta_cache[key]
    value = _euler_maclaurin_zeta(m, prec)
    with _zeta_lock:
        _zeta_cache[key] = value
        _store_disk_cache(prec)
    return value


def pi_value(prec: int) -> mpmath.mpf:
    with mpmath.workprec(prec):
        return +mpmath.pi


def eval_formal(x: FormalNumber | Scalar, precision_bits: int = 256) -> BigComplex:
    """Evaluate a formal number numerically.

    The relative error is below 2^(8 - precision_bits) for numbers whose terms do
    not cancel catastrophically; the working precision carries a margin for that.
    """
    if precision_bits < 64:
        raise ValueError("precision_bits must be at least 64")
    fx = as_formal(x)
    work = precision_bits + 32
    with mpmath.workprec(work):
        pi2 = pi_value(work) ** 2
        parts = []
        for mono, c in fx.items():
            v = mpmath.mpf(c.numerator) / c.denominator
            if mono.pi2_exponent:
                v *= pi2 ** mono.pi2_exponent
            for m, e in mono.zeta_exponents:
                v *= zeta_odd_value(m, work) ** e
            parts.append(v)
        total = mpmath.fsum(parts)
    return BigComplex(total, precision_bits)


def formal_sum(values: Iterable[FormalNumber | Scalar]) -> FormalNumber:
    out = FormalNumber()
    for v in values:
        out = out + v
    return out
