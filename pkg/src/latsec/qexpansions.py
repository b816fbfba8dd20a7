"""Exact q-expansions: Bernoulli numbers, weight-4/6 Eisenstein series, the
modular discriminant, and extremal even-unimodular theta series.

Series are truncated q-expansions indexed by squared norm: a series is a
dict mapping the exponent of q (an even integer for everything modular
here) to an exact Fraction coefficient.  Floating point never enters; the
Table of extremal coefficients and the exact secrecy gains fall out of
rational arithmetic alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

Series = dict[int, Fraction]

MAX_BERNOULLI = 200
MAX_EXACT_DIM = 200

# ratios E4(e^-pi)/theta3^8(e^-pi) and Delta(e^-pi)/theta3^24(e^-pi)
RHO_E4 = Fraction(3, 4)
RHO_DELTA = Fraction(1, 2**12)


@lru_cache(maxsize=None)
def _bernoulli_upto(n: int) -> tuple[Fraction, ...]:
    # recurrence sum_{j<=m} C(m+1,j) B_j = 0 from the generating function
    b = [Fraction(1)]
    for m in range(1, n + 1):
        s = sum(Fraction(comb(m + 1, j)) * b[j] for j in range(m))
        b.append(-s / (m + 1))
    return tuple(b)


def bernoulli(l: int) -> Fraction:
    """Exact Bernoulli number B_l (convention B_1 = -1/2)."""
    if not 0 <= l <= MAX_BERNOULLI:
        raise ValueError(f"index must be in 0..{MAX_BERNOULLI}")
    return _bernoulli_upto(MAX_BERNOULLI if l > 60 else max(l, 12))[l]


# ---------------------------------------------------------------------------
# Series arithmetic (exponents of q; truncation order = largest exponent kept)


def series_mul(a: Series, b: Series, order: int) -> Series:
    out: Series = {}
    for ea, ca in a.items():
        if ca == 0:
            continue
        for eb, cb in b.items():
            e = ea + eb
            if e <= order and cb != 0:
                out[e] = out.get(e, Fraction(0)) + ca * cb
    return out


def series_pow(a: Series, k: int, order: int) -> Series:
    result: Series = {0: Fraction(1)}
    base = dict(a)
    while k:
        if k & 1:
            result = series_mul(result, base, order)
        k >>= 1
        if k:
            base = series_mul(base, base, order)
    return result


def series_add(a: Series, b: Series, scale: Fraction = Fraction(1)) -> Series:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, Fraction(0)) + scale * c
    return {e: c for e, c in out.items()}


def _sigma(k: int, m: int) -> int:
    return sum(d**k for d in range(1, m + 1) if m % d == 0)


@lru_cache(maxsize=None)
def e4_qexp(order: int) -> tuple[tuple[int, Fraction], ...]:
    """E4 = 1 + 240 sum sigma_3(m) q^(2m), up to the given exponent."""
    items = [(0, Fraction(1))]
    for m in range(1, order // 2 + 1):
        items.append((2 * m, Fraction(240 * _sigma(3, m))))
    return tuple(items)


@lru_cache(maxsize=None)
def e6_qexp(order: int) -> tuple[tuple[int, Fraction], ...]:
    """E6 = 1 - 504 sum sigma_5(m) q^(2m), up to the given exponent."""
    items = [(0, Fraction(1))]
    for m in range(1, order // 2 + 1):
        items.append((2 * m, Fraction(-504 * _sigma(5, m))))
    return tuple(items)


@lru_cache(maxsize=None)
def delta_qexp(order: int) -> tuple[tuple[int, Fraction], ...]:
    """Modular discriminant (E4^3 - E6^2)/1728; integer coefficients."""
    e4 = dict(e4_qexp(order))
    e6 = dict(e6_qexp(order))
    diff = series_add(series_pow(e4, 3, order), series_pow(e6, 2, order), Fraction(-1))
    out = []
    for e in sorted(diff):
        c = diff[e] / 1728
        assert c.denominator == 1, "discriminant coefficients must be integers"
        if c != 0:
            out.append((e, c))
    return tuple(out)


# ---------------------------------------------------------------------------
# Jacobi theta function q-expansions (exponents in quarter-integer units)


def theta_qexp(i: int, order4: int) -> dict[int, int]:
    """q-expansion of theta_2/3/4 with exponents in units of 1/4.

    Keys are 4 * exponent; order4 bounds the scaled exponent.
    """
    out: dict[int, int] = {}
    if i == 2:
        n = 0
        while (2 * n + 1) ** 2 <= order4:
            out[(2 * n + 1) ** 2] = out.get((2 * n + 1) ** 2, 0) + 2
            n += 1
    elif i in (3, 4):
        out[0] = 1
        n = 1
        while 4 * n * n <= order4:
            out[4 * n * n] = 2 * (-1) ** n if i == 4 else 2
            n += 1
    else:
        raise ValueError("theta index must be 2, 3 or 4")
    return out


def theta_product_qexp(powers: tuple[int, int, int], order: int) -> Series:
    """Expansion of theta2^a * theta3^b * theta4^c up to exponent `order`.

    Valid whenever the result has integer exponents (a multiple of 8 for
    the theta2 power).
    """
    a, b, c = powers
    order4 = 4 * order
    prod: dict[int, int] = {0: 1}

    def mul(p, q):
        out: dict[int, int] = {}
        for e1, c1 in p.items():
            for e2, c2 in q.items():
                e = e1 + e2
                if e <= order4:
                    out[e] = out.get(e, 0) + c1 * c2
        return out

    def powi(p, k):
        r = {0: 1}
        while k:
            if k & 1:
                r = mul(r, p)
            k >>= 1
            if k:
                p = mul(p, p)
        return r

    prod = mul(powi(theta_qexp(2, order4), a), powi(theta_qexp(3, order4), b))
    prod = mul(prod, powi(theta_qexp(4, order4), c))
    out: Series = {}
    for e4x, cx in prod.items():
        if cx == 0:
            continue
        if e4x % 4 != 0:
            raise ValueError("theta product has non-integer exponents")
        out[e4x // 4] = Fraction(cx)
    return out


# ---------------------------------------------------------------------------
# Even unimodular theta series as polynomials in E4 and the discriminant


@dataclass(frozen=True)
class ThetaPolynomial:
    """Theta series E4^(3m+k) + sum_j b_j E4^(3(m-j)+k) Delta^j for an even
    unimodular lattice of dimension n = 24m + 8k."""

    n: int
    m: int
    k: int
    b: tuple[Fraction, ...]

    def __post_init__(self):
        if self.n != 24 * self.m + 8 * self.k or self.k not in (0, 1, 2):
            raise ValueError("need n = 24m + 8k with k in {0,1,2}")
        if len(self.b) != self.m:
            raise ValueError("need one coefficient per discriminant power")

    def qexp(self, order: int) -> Series:
        e4 = dict(e4_qexp(order))
        dl = dict(delta_qexp(order))
        out = series_pow(e4, 3 * self.m + self.k, order)
        for j in range(1, self.m + 1):
            term = series_mul(
                series_pow(e4, 3 * (self.m - j) + self.k, order),
                series_pow(dl, j, order),
                order,
            )
            out = series_add(out, term, self.b[j - 1])
        return out

    def min_norm_and_count(self) -> tuple[int, Fraction]:
        """(first nonzero exponent, its coefficient) of the q-expansion."""
        q = self.qexp(2 * self.m + 4)
        for e in sorted(q):
            if e > 0 and q[e] != 0:
                return e, q[e]
        raise AssertionError("series is identically 1 to this order")

    def weak_secrecy_gain(self) -> Fraction:
        """Exact gain from the fixed ratios of E4 and the discriminant to
        the cubic-lattice theta at the symmetry point."""
        inv = RHO_E4 ** (3 * self.m + self.k)
        for j in range(1, self.m + 1):
            inv += self.b[j - 1] * RHO_E4 ** (3 * (self.m - j) + self.k) * RHO_DELTA**j
        return 1 / inv

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "k": self.k, "b": [str(x) for x in self.b]}

    @staticmethod
    def from_json(obj) -> "ThetaPolynomial":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return ThetaPolynomial(
            int(obj["n"]), int(obj["m"]), int(obj["k"]),
            tuple(Fraction(s) for s in obj["b"]),
        )


def _solve_fraction_system(a: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rhs)
    m = [row[:] + [rhs[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        assert piv is not None, "extremal system must be nonsingular"
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


@lru_cache(maxsize=None)
def extremal_theta(n: int) -> ThetaPolynomial:
    """Unique theta polynomial in dimension n (multiple of 8) whose
    q-expansion is 1 + O(q^(2m+2)): the extremal even-unimodular series."""
    if n % 8 != 0 or n <= 0:
        raise ValueError("dimension must be a positive multiple of 8")
    if n > MAX_EXACT_DIM:
        raise ValueError(f"dimension capped at {MAX_EXACT_DIM}")
    m, k = divmod(n // 8, 3)
    order = 2 * m + 4
    e4 = dict(e4_qexp(order))
    dl = dict(delta_qexp(order))
    base = series_pow(e4, 3 * m + k, order)
    terms = [
        series_mul(series_pow(e4, 3 * (m - j) + k, order), series_pow(dl, j, order), order)
        for j in range(1, m + 1)
    ]
    a = [[terms[j].get(2 * i, Fraction(0)) for j in range(m)] for i in range(1, m + 1)]
    rhs = [-base.get(2 * i, Fraction(0)) for i in range(1, m + 1)]
    b = tuple(_solve_fraction_system(a, rhs)) if m else ()
    poly = ThetaPolynomial(n, m, k, b)
    # sanity: forced coefficients vanish, the next one is positive
    q = poly.qexp(order)
    assert all(q.get(2 * i, Fraction(0)) == 0 for i in range(1, m + 1))
    assert q.get(2 * m + 2, Fraction(0)) > 0
    return poly


def weak_secrecy_gain_exact(n_or_poly) -> Fraction:
    """Exact weak secrecy gain of the extremal even unimodular lattice of
    dimension n (or of an explicit theta polynomial)."""
    poly = n_or_poly if isinstance(n_or_poly, ThetaPolynomial) else extremal_theta(n_or_poly)
    return poly.weak_secrecy_gain()


def polynomial_pretty(poly: ThetaPolynomial) -> str:
    """Human-readable form like 'E4^3 - 720*Delta'."""
    parts = []
    e4_pow = 3 * poly.m + poly.k
    head = "1" if e4_pow == 0 else ("E4" if e4_pow == 1 else f"E4^{e4_pow}")
    parts.append(head)
    for j, bj in enumerate(poly.b, start=1):
        if bj == 0:
            continue
        p = 3 * (poly.m - j) + poly.k
        factor = "" if p == 0 else ("E4*" if p == 1 else f"E4^{p}*")
        dpow = "Delta" if j == 1 else f"Delta^{j}"
        mag = -bj if bj < 0 else bj
        coeff = str(mag.numerator) if mag.denominator == 1 else str(mag)
        sign = " - " if bj < 0 else " + "
        parts.append(f"{sign}{coeff}*{factor}{dpow}")
    return "".join(parts)
