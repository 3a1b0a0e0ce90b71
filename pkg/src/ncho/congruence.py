"""Prime-power congruences among normalized Apery-like numbers.

Values such as p^(2sn) J~_{2s+2}(m p^n) are needed for arguments near 10^5, far
beyond what exact rational tables can reach quickly.  They are evaluated here as
p-adic numbers from the binomial sum over nested harmonic-type sums, working with
integers modulo a prime power throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

__all__ = [
    "PAdic",
    "ordp",
    "residue",
    "padic_jtilde",
    "CongruenceResult",
    "weak_congruence",
    "ConjectureRow",
    "ConjectureReport",
    "conjecture_report",
    "binom_lemma_check",
    "ordp_bound_check",
    "central_binom_experiment",
]


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or any(p % d == 0 for d in range(3, int(p**0.5) + 1, 2)):
        raise ValueError(f"{p} is not an odd prime")


def _split(x: int, p: int) -> tuple[int, int]:
    """(v, u) with x = p^v u and p not dividing u; x must be nonzero."""
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


def ordp(x: Fraction | int, p: int) -> int:
    """Exponent of p in the nonzero rational x (negative for denominators)."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("ordp of zero is undefined")
    return _split(x.numerator, p)[0] - _split(x.denominator, p)[0]


def residue(x: Fraction | int, p: int, n: int) -> int:
    """x mod p^n for a p-integral rational x, in [0, p^n)."""
    x = Fraction(x)
    if n < 1:
        raise ValueError("residue needs n >= 1")
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not {p}-integral (ord_{p} = {ordp(x, p)})")
    mod = p**n
    return x.numerator * pow(x.denominator, -1, mod) % mod


@dataclass(frozen=True)
class PAdic:
    """p^valuation * unit_residue, the unit known modulo p^precision.

    A zero flag means the value is only known to vanish modulo p^valuation.
    """

    p: int
    valuation: int
    unit_residue: int
    precision: int
    is_zero: bool = False

    @property
    def absolute_precision(self) -> int:
        return self.valuation if self.is_zero else self.valuation + self.precision

    @classmethod
    def from_scaled(cls, p: int, X: int, scale: int, K: int) -> "PAdic":
        """The value X p^(-scale), where X is known modulo p^K."""
        X %= p**K
        if X == 0:
            return cls(p, K - scale, 0, 0, True)
        v, u = _split(X, p)
        rel = K - v
        return cls(p, v - scale, u % p**rel, rel)

    @classmethod
    def from_rational(cls, x: Fraction | int, p: int, precision: int) -> "PAdic":
        x = Fraction(x)
        if x == 0:
            return cls(p, precision, 0, 0, True)
        v = ordp(x, p)
        y = x / Fraction(p) ** v
        mod = p**precision
        return cls(p, v, y.numerator * pow(y.denominator, -1, mod) % mod, precision)

    def residue(self, n: int) -> int:
        """The value modulo p^n; needs p-integrality and enough precision."""
        if self.is_zero:
            if self.valuation < n:
                raise ValueError("not enough precision for this residue")
            return 0
        if self.valuation < 0:
            raise ValueError("value is not p-integral")
        if self.absolute_precision < n:
            raise ValueError("not enough precision for this residue")
        return self.unit_residue * self.p**self.valuation % self.p**n

    def scaled(self, e: int) -> "PAdic":
        """Multiply by p^e."""
        return PAdic(self.p, self.valuation + e, self.unit_residue, self.precision, self.is_zero)


# --------------------------------------------------------------------------- #
# p-adic evaluation of J~
# --------------------------------------------------------------------------- #


def _log_floor(x: int, p: int) -> int:
    e, q = 0, p
    while q <= x:
        e += 1
        q *= p
    return e


@lru_cache(maxsize=256)
def _sweep(parity: str, p: int, N: int, level: int, s_max: int, abs_prec: int) -> tuple[tuple[int, int, int], ...]:
    """Scaled residues of p^(level*weight) J~(N) for s = 1..s_max.

    Returns (X, scale, K) per s with the value equal to X p^(-scale) modulo p^(K-scale).
    For even parity the value is p^(2 s level) J~_{2s+2}(N); for odd parity it is
    p^((2s+1) level) J~_{2s+1}(N).
    """
    L = _log_floor(2 * N - 1, p) if N >= 1 else 0
    D = max(0, 2 * L - 2 * level)
    D_odd = max(0, 3 * L + 2 * _log_floor(2 * N, p) - 3 * level)
    scales = []
    for s in range(1, s_max + 1):
        if parity == "even":
            scales.append(s * D)
        else:
            scales.append(D_odd + (s - 1) * D)
    K = abs_prec + max(scales)
    mod = p**K

    # running elementary sums e[1..s_max] over indices j < k, scaled so each is integral
    e = [0] * (s_max + 1)
    if parity == "even":
        e[0] = 1
    totals = [0] * (s_max + 1)

    # c_k = (-1)^k b_k^2 C(N, k) tracked as sign * p^cv * cu
    cv, cu, csign = 0, 1, 1
    # C(2j, j) tracked as p^bv * bu for the odd weight
    bv, bu = 0, 1
    four_inv = pow(4, -1, mod)
    for k in range(N + 1):
        if cv < K:
            c = csign * cu * p**cv % mod
            for s in range(1, s_max + 1):
                if e[s]:
                    totals[s] = (totals[s] + c * e[s]) % mod
        # add index j = k to the running sums
        j = k
        t, u = _split(2 * j + 1, p)
        u_inv = pow(u, -1, mod)
        w_exp = 2 * level + D - 2 * t
        w = 4 * u_inv * u_inv * p**w_exp % mod
        for i in range(s_max, 1, -1):
            e[i] = (e[i] + w * e[i - 1]) % mod
        if parity == "even":
            e[1] = (e[1] + w * e[0]) % mod
        else:
            # 8 / (2j+1)^3 * 16^j / C(2j, j)^2, scaled by p^(3 level + D_odd)
            o_exp = 3 * level + D_odd - 3 * t - 2 * bv
            bu_inv = pow(bu, -1, mod)
            o = 8 * pow(16, j, mod) * u_inv**3 * bu_inv * bu_inv * p**o_exp % mod
            e[1] = (e[1] + o) % mod
        # C(2j+2, j+1) = C(2j, j) * 2 (2j+1) / (j+1)
        tv, tu = _split(j + 1, p)
        bv += t - tv
        bu = bu * 2 * u * pow(tu, -1, mod) % mod
        # c_{k+1} / c_k = -((2k+1)/(2k+2))^2 (N-k)/(k+1)
        if k < N:
            nv, nu = _split(N - k, p)
            cv += 2 * t + nv - 3 * tv
            cu = cu * u * u * nu % mod
            cu = cu * pow(tu, -3, mod) * four_inv % mod
            csign = -csign
    out = []
    for s in range(1, s_max + 1):
        X = totals[s] * (-1) ** s
        if parity == "odd":
            X = X * pow(2, -1, mod)
        out.append((X % mod, scales[s - 1], K))
    return tuple(out)


def padic_jtilde(parity: str, p: int, N: int, level: int, s: int, abs_prec: int) -> PAdic:
    """p^(2 s level) J~_{2s+2}(N) (even) or p^((2s+1) level) J~_{2s+1}(N) (odd).

    The result is correct modulo p^abs_prec.
    """
    _check_odd_prime(p)
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    if s < 1 or N < 0 or level < 0:
        raise ValueError("need s >= 1, N >= 0 and level >= 0")
    X, scale, K = _sweep(parity, p, N, level, max(s, 3), abs_prec)[s - 1]
    return PAdic.from_scaled(p, X, scale, K)


# --------------------------------------------------------------------------- #
# The proved congruence
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class CongruenceResult:
    p: int
    m: int
    s: int
    n: int
    holds: bool
    lhs_residue: int
    rhs_residue: int

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return {"p": self.p, "m": self.m, "s": self.s, "n": self.n, "holds": self.holds,
                "lhs_residue": self.lhs_residue, "rhs_residue": self.rhs_residue}


def weak_congruence(p: int, m: int, s: int, n: int) -> CongruenceResult:
    """p^(2sn) J~_{2s+2}(m p^n) against p^(2s(n-1)) J~_{2s+2}(m p^(n-1)) modulo p^n."""
    _check_odd_prime(p)
    if not 1 <= m or 2 * m >= p:
        raise ValueError("the congruence needs 1 <= m < p/2")
    if s < 1 or n < 1:
        raise ValueError("need s >= 1 and n >= 1")
    lhs = padic_jtilde("even", p, m * p**n, n, s, n)
    rhs = padic_jtilde("even", p, m * p ** (n - 1), n - 1, s, n)
    a, b = lhs.residue(n), rhs.residue(n)
    return CongruenceResult(p, m, s, n, a == b, a, b)


# --------------------------------------------------------------------------- #
# The conjectured ratio congruence
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class ConjectureRow:
    n: int
    congruence_holds: bool
    nonzero_holds: bool
    difference_order: int | None  # ord_p of the ratio difference, None if above the precision used

    @property
    def passed(self) -> bool:
        return self.congruence_holds and self.nonzero_holds


@dataclass(frozen=True)
class ConjectureReport:
    p: int
    m: int
    s: int
    parity: str
    reference_order: int
    rows: tuple[ConjectureRow, ...] = field(default_factory=tuple)

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "p": self.p, "m": self.m, "s": self.s, "parity": self.parity,
            "reference_order": self.reference_order, "all_pass": self.all_pass,
            "rows": [{"n": r.n, "holds": r.passed, "congruence": r.congruence_holds,
                      "nonzero": r.nonzero_holds, "difference_order": r.difference_order} for r in self.rows],
        }


def _value(parity: str, p: int, m: int, s: int, n: int, abs_prec: int) -> PAdic:
    return padic_jtilde(parity, p, m * p**n, n, s, abs_prec)


def conjecture_report(p: int, m: int, s: int, n_max: int, parity: str = "even") -> ConjectureReport:
    """Check the ratio congruence for n = 2..n_max against the reference at level 1.

    With R = p^e J~(m p) of valuation t, row n asks whether
    ord_p(X_n - X_{n-1}) - t >= n and ord_p(X_{n-1}) - t < n, where
    X_n = p^(e n) J~(m p^n) and e is 2s (even) or 2s+1 (odd).
    """
    _check_odd_prime(p)
    if m < 1 or s < 1:
        raise ValueError("need m >= 1 and s >= 1")
    if m * p < s:
        raise ValueError("the conjecture needs m p >= s")
    prec = 4
    while True:
        ref = _value(parity, p, m, s, 1, prec)
        if not ref.is_zero:
            break
        if prec > 256:
            raise ArithmeticError("reference value vanishes to high p-adic precision")
        prec *= 2
    t = ref.valuation
    rows = []
    for n in range(2, n_max + 1):
        need = t + n
        cur = _value(parity, p, m, s, n, max(1, need))
        prev = _value(parity, p, m, s, n - 1, max(1, need))
        d = _difference_valuation(cur, prev, need)
        congruent = d is None
        nonzero = not prev.is_zero and prev.valuation < need
        rows.append(ConjectureRow(n, congruent, nonzero, None if d is None else d - t))
    return ConjectureReport(p, m, s, parity, t, tuple(rows))


def _difference_valuation(a: PAdic, b: PAdic, bound: int) -> int | None:
    """ord_p(a - b) if it is below ``bound``, else None; both must be known modulo p^bound."""
    low = min(x.valuation for x in (a, b) if not x.is_zero) if not (a.is_zero and b.is_zero) else bound
    shift = max(0, -low)
    mod = a.p ** (bound + shift)

    def lift(x: PAdic) -> int:
        return 0 if x.is_zero else x.unit_residue * x.p ** (x.valuation + shift) % mod

    diff = (lift(a) - lift(b)) % mod
    if diff == 0:
        return None
    return _split(diff, a.p)[0] - shift


# --------------------------------------------------------------------------- #
# Binomial lemmas
# --------------------------------------------------------------------------- #


def _binom_half_sq(j: int) -> Fraction:
    return Fraction(comb(2 * j, j), 4**j) ** 2


def _congruent(a: Fraction, b: Fraction, p: int, n: int) -> bool:
    d = a - b
    return d == 0 or ordp(d, p) >= n


def binom_lemma_check(p: int, m: int, n: int, j: int) -> bool:
    """The two binomial congruences modulo p^n used for the proved case."""
    _check_odd_prime(p)
    if min(m, n, j) < 1:
        raise ValueError("all arguments must be positive")
    lhs = _binom_half_sq(p * j) * comb(m * p**n, p * j)
    rhs = _binom_half_sq(j) * comb(m * p ** (n - 1), j)
    first = _congruent(lhs, rhs, p, n)
    second = j % p == 0 or comb(m * p**n, j) % p**n == 0
    return first and second


def ordp_bound_check(p: int, n: int, j: int) -> bool:
    """ord_p C(2j, j) <= n - ord_p(2j+1) whenever 2j+1 < p^(n+1)."""
    _check_odd_prime(p)
    if j < 0 or not 1 <= 2 * j + 1 < p ** (n + 1):
        raise ValueError("needs 1 <= 2j+1 < p^(n+1)")
    return ordp(comb(2 * j, j), p) <= n - ordp(2 * j + 1, p)


@dataclass(frozen=True)
class CentralBinomRow:
    j: int
    r: int
    s: int
    proved_holds: bool
    conjectural_holds: bool


def central_binom_experiment(p: int, j_max: int) -> list[CentralBinomRow]:
    """C(2j', 2j'/2) against (-1)^((p-1)/2) C(2j, j) where 2j'+1 = p(2j+1).

    The congruence modulo p^(r+1) is proved; the one modulo p^(s+r+1) is open.
    """
    _check_odd_prime(p)
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    sign = (-1) ** ((p - 1) // 2)
    rows = []
    for j in range(j_max + 1):
        jp = (p * (2 * j + 1) - 1) // 2
        r = ordp(2 * j + 1, p)
        s = ordp(comb(2 * j, j), p)
        diff = comb(2 * jp, jp) - sign * comb(2 * j, j)
        rows.append(CentralBinomRow(j, r, s, diff % p ** (r + 1) == 0, diff % p ** (s + r + 1) == 0))
    return rows
