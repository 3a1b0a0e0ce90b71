"""Determinant identities and integrals behind the special values zeta_Q(k).

The exact part works over Q(i): the cyclic tridiagonal matrices Delta_k(u), the
diagonal perturbations Xi_k, their determinants and LDL^T factorizations, and the
expansion of det(Delta + kappa Xi) prod(1 - u^4) into products of C_k factors.
The numeric part integrates the resulting algebraic functions over the unit cube.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

import mpmath
import numpy as np
from scipy.stats import qmc

from .analytic import f21
from .apery import NumericEstimate, SpectralParams, j_formal
from .numcore import eval_formal, zeta_half

__all__ = [
    "GaussRat",
    "CycMatrix",
    "QuadConfig",
    "delta",
    "xi",
    "det_exact",
    "principal_minors",
    "vn_check",
    "c_factor",
    "den_terms",
    "den_expand_check",
    "ldu",
    "compositions",
    "anomaly_integral",
    "r1_quad",
    "r1_series",
    "r2_quad",
    "zetaQ",
    "zetaQ_degenerate",
    "zetaQ2_closed",
]


# --------------------------------------------------------------------------- #
# Q(i) and matrices over it
# --------------------------------------------------------------------------- #


class GaussRat:
    """a + b i with rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re: Fraction | int = 0, im: Fraction | int = 0) -> None:
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def of(x: object) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussRat(x)
        raise TypeError(f"cannot convert {type(x).__name__} to GaussRat")

    def __add__(self, other: object) -> "GaussRat":
        o = GaussRat.of(other)
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussRat":
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other: object) -> "GaussRat":
        return self + (-GaussRat.of(other))

    def __rsub__(self, other: object) -> "GaussRat":
        return GaussRat.of(other) - self

    def __mul__(self, other: object) -> "GaussRat":
        o = GaussRat.of(other)
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other: object) -> "GaussRat":
        o = GaussRat.of(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        p = self * o.conj()
        return GaussRat(p.re / n, p.im / n)

    def __rtruediv__(self, other: object) -> "GaussRat":
        return GaussRat.of(other) / self

    def __eq__(self, other: object) -> bool:
        try:
            o = GaussRat.of(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __repr__(self) -> str:
        return f"GaussRat({self.re}, {self.im})"

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


class CycMatrix:
    """Square matrix with GaussRat entries."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence[object]]) -> None:
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        self.rows = tuple(tuple(GaussRat.of(x) for x in r) for r in rows)

    @classmethod
    def zeros(cls, n: int) -> "CycMatrix":
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def identity(cls, n: int) -> "CycMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> GaussRat:
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other: "CycMatrix") -> "CycMatrix":
        return CycMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def scale(self, c: object) -> "CycMatrix":
        c = GaussRat.of(c)
        return CycMatrix([[c * a for a in r] for r in self.rows])

    def __matmul__(self, other: "CycMatrix") -> "CycMatrix":
        n = self.size
        return CycMatrix([[sum((self.rows[i][k] * other.rows[k][j] for k in range(n)), GaussRat())
                           for j in range(n)] for i in range(n)])

    def transpose(self) -> "CycMatrix":
        n = self.size
        return CycMatrix([[self.rows[j][i] for j in range(n)] for i in range(n)])

    def leading(self, m: int) -> "CycMatrix":
        return CycMatrix([r[:m] for r in self.rows[:m]])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CycMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def is_real_symmetric(self) -> bool:
        n = self.size
        return all(self.rows[i][j] == self.rows[j][i] and self.rows[i][j].im == 0
                   for i in range(n) for j in range(n))


def _check_u(u: Sequence[object]) -> list[Fraction]:
    out = [Fraction(x) for x in u]
    if any(not 0 < x < 1 for x in out):
        raise ValueError("every u_i must lie in (0, 1)")
    return out


def delta(k: int, u: Sequence[object]) -> CycMatrix:
    """Delta_k(u) = sum_i (E_ii + E_{i+1,i+1})(1/(1-u_i^4) - 1/2) - (E_{i,i+1} + E_{i+1,i}) u_i^2/(1-u_i^4)."""
    if k < 2:
        raise ValueError("delta needs k >= 2")
    u = _check_u(u)
    if len(u) != k:
        raise ValueError(f"expected {k} values of u")
    m = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        nxt = (i + 1) % k
        a = 1 / (1 - u[i] ** 4) - Fraction(1, 2)
        b = -u[i] ** 2 / (1 - u[i] ** 4)
        m[i][i] += a
        m[nxt][nxt] += a
        m[i][nxt] += b
        m[nxt][i] += b
    return CycMatrix(m)


def xi(k: int, iset: Iterable[int]) -> CycMatrix:
    """sqrt(-1) sum_r (-1)^r E_{i_r i_r} over the sorted 1-based index set."""
    idx = sorted(iset)
    if len(idx) % 2:
        raise ValueError("the index set must have even size")
    if len(set(idx)) != len(idx) or any(not 1 <= i <= k for i in idx):
        raise ValueError(f"indices must be distinct and within 1..{k}")
    m = [[GaussRat() for _ in range(k)] for _ in range(k)]
    for r, i in enumerate(idx, start=1):
        m[i - 1][i - 1] = GaussRat(0, (-1) ** r)
    return CycMatrix(m)


def det_exact(A: CycMatrix) -> GaussRat:
    """Determinant by Bareiss elimination with row pivoting."""
    n = A.size
    M = [list(r) for r in A.rows]
    sign = 1
    prev = GaussRat(1)
    for k in range(n - 1):
        if not M[k][k]:
            swap = next((r for r in range(k + 1, n) if M[r][k]), None)
            if swap is None:
                return GaussRat()
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / prev
            M[i][k] = GaussRat()
        prev = M[k][k]
    d = M[n - 1][n - 1]
    return d if sign == 1 else -d


def principal_minors(A: CycMatrix) -> list[GaussRat]:
    """[d_0, d_1, ..., d_n] with d_0 = 1 and d_m the leading m x m minor."""
    return [GaussRat(1)] + [det_exact(A.leading(m)) for m in range(1, A.size + 1)]


def vn_check(k: int, u: Sequence[object]) -> bool:
    """det Delta_k(u) against (1 - prod u^2)^2 / prod (1 - u^4), exactly."""
    if k > 8:
        raise ValueError("vn_check is limited to k <= 8")
    u = _check_u(u)
    prod_sq = math.prod(u) ** 2
    closed = (1 - prod_sq) ** 2 / math.prod(1 - x**4 for x in u)
    return det_exact(delta(k, u)) == closed


# --------------------------------------------------------------------------- #
# Expansion of the perturbed determinant
# --------------------------------------------------------------------------- #


def c_factor(k: int, u: Sequence[object], jset: Iterable[int]) -> Fraction:
    """C_k(u; j): product over cyclically consecutive members of 1 - u_a^4 ... u_{b-1}^4.

    The empty set gives (1 - u_1^2 ... u_k^2)^2.
    """
    u = [Fraction(x) for x in u]
    js = sorted(jset)
    if not js:
        return (1 - math.prod(u) ** 2) ** 2
    out = Fraction(1)
    for a, b in zip(js, js[1:] + [js[0] + k]):
        block = math.prod(u[(i - 1) % k] ** 4 for i in range(a, b))
        out *= 1 - block
    return out


def den_terms(k: int, u: Sequence[object], jset: Iterable[int]) -> dict[int, Fraction]:
    """den_{k,d}(u; j) = sum over |S| = 2d of (-1)^(sum S) C_k(u; j(S)), S a set of positions."""
    js = sorted(jset)
    if len(js) % 2 or len(js) > 4:
        raise ValueError("jset must have even size at most 4")
    u = [Fraction(x) for x in u]
    out: dict[int, Fraction] = {}
    for d in range(len(js) // 2 + 1):
        total = Fraction(0)
        for S in combinations(range(1, len(js) + 1), 2 * d):
            total += (-1) ** sum(S) * c_factor(k, u, [js[s - 1] for s in S])
        out[d] = total
    return out


def den_expand_check(k: int, u: Sequence[object], kappa: object, jset: Iterable[int]) -> bool:
    """sum_d (-kappa^2)^d den_{k,d} equals det(Delta + kappa Xi) prod(1 - u^4), exactly."""
    js = sorted(jset)
    u = _check_u(u)
    kappa = Fraction(kappa)
    lhs = sum(((-kappa * kappa) ** d * v for d, v in den_terms(k, u, js).items()), Fraction(0))
    A = delta(k, u) + xi(k, js).scale(kappa)
    rhs = det_exact(A) * math.prod(1 - x**4 for x in u)
    return rhs == GaussRat(lhs)


@dataclass(frozen=True)
class LDU:
    L: CycMatrix
    D: tuple[GaussRat, ...]
    minors: tuple[GaussRat, ...]
    verified: bool


def ldu(A: CycMatrix) -> LDU:
    """A = L diag(D) L^T with L unit lower triangular; D_j = d_j / d_{j-1}."""
    n = A.size
    minors = principal_minors(A)
    for m, d in enumerate(minors):
        if not d:
            raise ValueError(f"leading principal minor of size {m} vanishes")
    L = [[GaussRat(1) if i == j else GaussRat() for j in range(n)] for i in range(n)]
    D: list[GaussRat] = []
    for j in range(n):
        dj = A[j, j] - sum((L[j][t] * L[j][t] * D[t] for t in range(j)), GaussRat())
        D.append(dj)
        for i in range(j + 1, n):
            L[i][j] = (A[i, j] - sum((L[i][t] * L[j][t] * D[t] for t in range(j)), GaussRat())) / dj
    Lm = CycMatrix(L)
    Dm = CycMatrix([[D[i] if i == j else 0 for j in range(n)] for i in range(n)])
    rebuilt = Lm @ Dm @ Lm.transpose()
    ratios_ok = all(D[j] == minors[j + 1] / minors[j] for j in range(n))
    return LDU(Lm, tuple(D), tuple(minors), rebuilt == A and ratios_ok)


# --------------------------------------------------------------------------- #
# Numerical integrals
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class QuadConfig:
    """Cube quadrature settings.

    ``tensor_gl`` uses ``nodes`` Gauss-Legendre points per axis; ``stratified_mc``
    averages ``replicates`` independently scrambled Sobol blocks of 2^``log2_samples``.
    """

    method: str = "auto"
    nodes: int = 64
    log2_samples: int = 16
    replicates: int = 8
    seed: int = 0
    substitution: bool = True

    def resolve(self, k: int) -> str:
        method = {"tensor": "tensor_gl", "mc": "stratified_mc"}.get(self.method, self.method)
        if method == "auto":
            return "tensor_gl" if k <= 3 else "stratified_mc"
        if method not in ("tensor_gl", "stratified_mc"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        return method


def compositions(k: int, parts: int) -> list[tuple[int, ...]]:
    """All (t_1, ..., t_parts) of positive integers summing to k."""
    return [t for t in product(range(1, k + 1), repeat=parts) if sum(t) == k]


def _one_minus_prod_pow(logs: np.ndarray, power: int) -> np.ndarray:
    """1 - prod u_i^power computed from log u_i without cancellation."""
    return -np.expm1(power * logs.sum(axis=0))


def _integrand(k: int, v: np.ndarray, terms: list[tuple[float, list[tuple[int, ...]]]], substitution: bool) -> np.ndarray:
    """2^k / sqrt(V_k + sum coeff * U_t) at u = 1 - v^2 (or u = v), times the Jacobian.

    ``terms`` lists (coefficient, [compositions]) pairs whose U_t are summed.
    """
    if substitution:
        logs = np.log1p(-v * v)
        jac = np.prod(2 * v, axis=0)
    else:
        logs = np.log(v)
        jac = 1.0
    V = _one_minus_prod_pow(logs, 2) ** 2
    total = V
    for coeff, comps in terms:
        for t in comps:
            U = np.ones_like(V)
            start = 0
            for part in t:
                U = U * _one_minus_prod_pow(logs[start:start + part], 4)
                start += part
            total = total + coeff * U
    return (2.0**k) * jac / np.sqrt(total)


def _cube_integral(k: int, f, cfg: QuadConfig) -> tuple[float, float, str]:
    method = cfg.resolve(k)
    if method == "tensor_gl":
        def rule(n: int) -> float:
            x, w = np.polynomial.legendre.leggauss(n)
            x = (x + 1) / 2
            w = w / 2
            grids = np.meshgrid(*([x] * (k - 1)), indexing="ij")
            wgrids = np.meshgrid(*([w] * (k - 1)), indexing="ij")
            rest = np.vstack([g.ravel() for g in grids]) if k > 1 else np.zeros((0, 1))
            wrest = np.prod(np.vstack([g.ravel() for g in wgrids]), axis=0) if k > 1 else np.ones(1)
            total = 0.0
            for x0, w0 in zip(x, w):
                pts = np.vstack([np.full(rest.shape[1], x0), rest])
                total += w0 * float(np.sum(wrest * f(pts)))
            return total

        val = rule(cfg.nodes)
        coarse = rule(max(4, cfg.nodes // 2))
        if not math.isfinite(val):
            raise ArithmeticError("tensor quadrature produced a non-finite value")
        return val, abs(val - coarse), "tensor_gl"
    means = []
    for r in range(cfg.replicates):
        sampler = qmc.Sobol(d=k, scramble=True, seed=np.random.default_rng([cfg.seed, r]))
        pts = sampler.random_base2(cfg.log2_samples).T
        means.append(float(np.mean(f(pts))))
    m = float(np.mean(means))
    if not math.isfinite(m):
        raise ArithmeticError("Monte Carlo estimate is not finite")
    return m, float(np.std(means, ddof=1) / math.sqrt(len(means))), "stratified_mc"


def anomaly_integral(k: int, terms: Sequence[tuple[float, Sequence[tuple[int, ...]]]],
                     cfg: QuadConfig = QuadConfig()) -> NumericEstimate:
    """int over [0,1]^k of 2^k du / sqrt(V_k + sum_c c * sum_t U_t) for (c, [t, ...]) in ``terms``."""
    for _, comps in terms:
        for t in comps:
            if sum(t) != k or any(part < 1 for part in t):
                raise ValueError(f"{t} is not a composition of {k}")
    terms = [(float(c), [tuple(t) for t in comps]) for c, comps in terms]
    val, err, method = _cube_integral(k, lambda v: _integrand(k, v, terms, cfg.substitution), cfg)
    return NumericEstimate(float(val), float(err), f"{method}, seed={cfg.seed}")


def r1_quad(k: int, kappa: float, cfg: QuadConfig = QuadConfig()) -> NumericEstimate:
    """First anomaly (k/2) sum_{r=1}^{k-1} int 2^k du / sqrt(V_k + kappa^2 U_(r, k-r))."""
    if not 2 <= k <= 5:
        raise ValueError("r1_quad covers k = 2..5")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    parts = [anomaly_integral(k, [(kappa**2, [(r, k - r)])], cfg) for r in range(1, k)]
    scale = k / 2
    return NumericEstimate(scale * sum(p.value for p in parts), scale * sum(p.error for p in parts),
                           parts[0].detail)


def r2_quad(k: int, kappa: float, cfg: QuadConfig = QuadConfig()) -> NumericEstimate:
    """Second anomaly (k/4) sum over 4-part compositions t of k of the cube integral."""
    if k not in (4, 5):
        raise ValueError("r2_quad covers k = 4, 5")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    parts = [anomaly_integral(k, [(kappa**2, [(t[0] + t[2], t[1] + t[3])]), (kappa**2 + kappa**4, [t])], cfg)
             for t in compositions(k, 4)]
    scale = k / 4
    return NumericEstimate(scale * sum(p.value for p in parts), scale * sum(p.error for p in parts),
                           parts[0].detail)


def r1_series(k: int, kappa: float, n_max: int | None = None, prec: int = 128) -> NumericEstimate:
    """(k/2) sum_n binom(-1/2, n) J_k(n) kappa^(2n) with an alternating-series tail bound."""
    if k < 2:
        raise ValueError("r1_series needs k >= 2")
    if not 0 <= kappa**2 < 0.9:
        raise ValueError("kappa^2 must stay below 0.9 for reliable truncation")
    with mpmath.workprec(prec + 16):
        x = mpmath.mpf(kappa) ** 2
        tol = mpmath.mpf(2) ** (-prec)
        total = mpmath.mpf(0)
        coeff = mpmath.mpf(1)  # binom(-1/2, n)
        n = 0
        last = mpmath.mpf(0)
        while True:
            term = coeff * eval_formal(j_formal(k, n), prec + 16).real * x**n
            total += term
            nxt_bound = abs(term) * x
            if n_max is not None and n >= n_max:
                last = abs(term)
                break
            if n > 2 and nxt_bound < tol * max(1, abs(total)):
                last = nxt_bound
                break
            coeff *= -(mpmath.mpf(n) + mpmath.mpf(1) / 2) / (n + 1)
            n += 1
            if n > 5000:
                raise ArithmeticError("r1_series did not converge")
        scale = mpmath.mpf(k) / 2
        return NumericEstimate(float(scale * total), float(scale * last), f"terms={n + 1}")


def _prefactor(params: SpectralParams, k: int) -> float:
    a, b = params.alpha, params.beta
    return 2 * ((a + b) / (2 * math.sqrt(a * b * (a * b - 1)))) ** k


def zetaQ(k: int, params: SpectralParams, cfg: QuadConfig = QuadConfig()) -> NumericEstimate:
    """zeta_Q(k) assembled from zeta(k, 1/2) and the anomaly integrals R_{k,1}, R_{k,2}."""
    if not 2 <= k <= 5:
        raise ValueError("zetaQ covers k = 2..5")
    eps2 = ((params.alpha - params.beta) / (params.alpha + params.beta)) ** 2
    kappa = params.kappa
    base = float(eval_formal(zeta_half(k), 64).real)
    inner, err = base, 0.0
    detail = ["zeta(k,1/2) exact"]
    if eps2:
        r1 = r1_quad(k, kappa, cfg)
        inner += eps2 * r1.value
        err += eps2 * r1.error
        detail.append(f"R1: {r1.detail}")
        if k >= 4:
            r2 = r2_quad(k, kappa, cfg)
            inner += eps2**2 * r2.value
            err += eps2**2 * r2.error
            detail.append(f"R2: {r2.detail}")
    pre = _prefactor(params, k)
    return NumericEstimate(pre * inner, pre * err, "; ".join(detail))


def zetaQ_degenerate(k: int, alpha: float) -> float:
    """2 (alpha^2 - 1)^(-k/2) zeta(k, 1/2), the value when alpha = beta."""
    if alpha <= 1:
        raise ValueError("needs alpha > 1")
    return 2 * (alpha * alpha - 1) ** (-k / 2) * float(eval_formal(zeta_half(k), 64).real)


def zetaQ2_closed(alpha: float, beta: float, prec: int = 128) -> float:
    """(pi(alpha+beta)/(2 sqrt(alpha beta (alpha beta - 1))))^2 (1 + eps^2 2F1(1/4, 3/4; 1; -kappa^2)^2).

    Valid while kappa^2 <= 19, where the Pfaff argument kappa^2/(1+kappa^2) stays within 0.95.
    """
    params = SpectralParams(alpha, beta)
    with mpmath.workprec(prec):
        a, b = mpmath.mpf(alpha), mpmath.mpf(beta)
        pre = (mpmath.pi * (a + b) / (2 * mpmath.sqrt(a * b * (a * b - 1)))) ** 2
        eps2 = ((a - b) / (a + b)) ** 2
        x = mpmath.mpf(params.kappa) ** 2
        # Pfaff: 2F1(1/4, 3/4; 1; -x) = (1+x)^(-1/4) 2F1(1/4, 1/4; 1; x/(1+x)), inside the summed disc
        h = (1 + x) ** (-mpmath.mpf(1) / 4) * f21(mpmath.mpf(1) / 4, mpmath.mpf(1) / 4, 1, x / (1 + x), prec).value.real
        return float(pre * (1 + eps2 * h * h))
