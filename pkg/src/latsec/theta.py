"""Numerical theta machinery: Jacobi theta functions, lattice theta series
(by enumeration and by closed form), Eisenstein series, the modular
discriminant, secrecy functions and gains, and the mass-formula lower
bound on the best achievable gain per dimension.

Series evaluations target ~1e-15 relative truncation error so that the
1e-9 comparisons downstream have plenty of headroom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .lattices import (
    DEFAULT_ENUM_CAP,
    EnumerationBudgetError,
    Lattice,
    enumerate_shells,
)
from .qexpansions import ThetaPolynomial, bernoulli

Q_EXP_PI = math.exp(-math.pi)

_TAIL = 1e-18
_MIN_TERMS = 50


class DomainError(ValueError):
    """Argument outside the convergence domain."""


class SymmetryPointUnknownError(ValueError):
    """Weak gain needs a lattice equivalent to its dual."""


def jacobi_theta(i: int, q: float) -> float:
    """theta_2 / theta_3 / theta_4 at real nome q in (0, 1).

    The tail criterion is relative while the partial sum is O(1) and
    absolute once it is smaller (theta_4 vanishes as q -> 1, where the
    alternating partial sums cancel to roundoff level).  q == 0.0 is
    accepted as the underflow limit of e^(-pi y) for very large y.
    """
    if not 0.0 <= q < 1.0:
        raise DomainError(f"nome must be in [0,1), got {q}")
    if q == 0.0:
        return 0.0 if i == 2 else 1.0
    if i == 2:
        s = 0.0
        n = 0
        while True:
            term = 2.0 * q ** ((n + 0.5) ** 2)
            s += term
            n += 1
            if n >= _MIN_TERMS and term < _TAIL * max(abs(s), 1.0):
                return s
    if i == 3 or i == 4:
        s = 1.0
        n = 1
        while True:
            term = 2.0 * q ** (n * n)
            s += -term if (i == 4 and n % 2) else term
            n += 1
            if n >= _MIN_TERMS and term < _TAIL * max(abs(s), 1.0):
                return s
    raise ValueError("theta index must be 2, 3 or 4")


def theta3_at_exp_pi() -> float:
    """theta_3(e^-pi), the constant behind the per-dimension gain growth."""
    return jacobi_theta(3, Q_EXP_PI)


# ---------------------------------------------------------------------------
# Lattice theta series


def _enum_radius(n: int, y: float, den: int) -> Fraction:
    """Truncation radius giving a < 1e-12 relative tail at nome e^(-pi y)."""
    r = 16.0 / y
    for _ in range(3):
        r = (34.0 + (n / 2 + 1) * math.log(r + 2.0)) / (math.pi * y)
    return Fraction(math.ceil(r * den), den)


def theta_enum(lat: Lattice, y: float, cap: int | None = None) -> float:
    """Theta series at nome e^(-pi y) by exact sphere enumeration.

    The truncation radius is chosen for a sub-1e-12 relative tail and the
    boundary shells are checked to decay geometrically; the radius grows
    if they do not.
    """
    if y <= 0:
        raise DomainError("y must be positive")
    cap = DEFAULT_ENUM_CAP if cap is None else cap
    _, den = lat._gram_int
    r = _enum_radius(lat.rank, y, den)
    for _ in range(8):
        shells = enumerate_shells(lat, r, cap)
        total = 0.0
        for norm in sorted(shells):
            total += shells[norm] * math.exp(-math.pi * y * float(norm))
        # geometric tail check on the outer shells
        cut = float(r) * 0.9
        outer = sum(
            shells[nm] * math.exp(-math.pi * y * float(nm))
            for nm in shells
            if float(nm) > cut
        )
        ratio = math.exp(-math.pi * y * (float(r) * 0.1))
        tail = outer * ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
        if tail < 1e-12 * total:
            return total
        r = r * 2
    raise EnumerationBudgetError("theta tail does not converge within the budget")


def theta_series_coefficients(lat: Lattice, radius2) -> dict[Fraction, int]:
    """Integer theta coefficients (squared norm -> count) up to radius2."""
    return enumerate_shells(lat, radius2)


@dataclass(frozen=True)
class QSeries:
    """Truncated integer q-expansion of a lattice theta series.

    Coefficients are keyed by den * (squared norm), so keys are integers;
    norm_bound is the truncation radius in squared-norm units.
    """

    coeffs: tuple[tuple[int, int], ...]
    norm_bound: Fraction
    den: int

    def __post_init__(self):
        d = dict(self.coeffs)
        if d.get(0) != 1:
            raise ValueError("the zero vector must contribute exactly one count")
        for key, count in d.items():
            if count < 0 or (key != 0 and count % 2):
                raise ValueError("nonzero shells come in +/- pairs")

    @staticmethod
    def from_lattice(lat: Lattice, norm_bound) -> "QSeries":
        _, den = lat._gram_int
        shells = enumerate_shells(lat, norm_bound)
        coeffs = tuple(sorted((int(k * den), v) for k, v in shells.items()))
        return QSeries(coeffs, Fraction(norm_bound), den)

    def count(self, norm2) -> int:
        return dict(self.coeffs).get(int(Fraction(norm2) * self.den), 0)

    def evaluate(self, y: float) -> float:
        """Truncated theta value at nome e^(-pi y); no tail control."""
        return sum(
            c * math.exp(-math.pi * y * k / self.den) for k, c in self.coeffs
        )


def theta_closed_form(name: str, y: float) -> float:
    """Closed forms in Jacobi thetas for the classical lattice families:
    Zn, Dn, E8 and the 24-dimensional Leech lattice."""
    if y <= 0:
        raise DomainError("y must be positive")
    q = math.exp(-math.pi * y)
    key = name.strip().upper().replace("LAMBDA", "L")
    if key.startswith("Z") and key[1:].isdigit():
        return jacobi_theta(3, q) ** int(key[1:])
    if key.startswith("D") and key[1:].isdigit():
        n = int(key[1:])
        return 0.5 * (jacobi_theta(3, q) ** n + jacobi_theta(4, q) ** n)
    if key == "E8":
        t2, t3, t4 = (jacobi_theta(i, q) for i in (2, 3, 4))
        return 0.5 * (t2**8 + t3**8 + t4**8)
    if key == "L24":
        t2, t3, t4 = (jacobi_theta(i, q) for i in (2, 3, 4))
        return (t2**8 + t3**8 + t4**8) ** 3 / 8.0 - 45.0 / 16.0 * (t2 * t3 * t4) ** 8
    raise KeyError(f"no closed-form theta for {name!r}")


def eisenstein(weight: int, q: float) -> float:
    """Eisenstein series of even weight >= 4 at nome q in (0,1), via the
    Lambert series with Bernoulli-number normalization."""
    if weight < 4 or weight % 2:
        raise ValueError("weight must be an even integer >= 4")
    if not 0.0 <= q < 1.0:
        raise DomainError(f"nome must be in [0,1), got {q}")
    if q == 0.0:
        return 1.0
    coef = float(Fraction(2 * weight) / bernoulli(weight))  # 4k/B_2k, weight=2k
    q2 = q * q
    if q2 == 0.0:  # the squared nome underflows: every Lambert term vanishes
        return 1.0
    s = 0.0
    m = 1
    peak = 0.0
    while True:
        qm = q2**m
        term = float(m) ** (weight - 1) * qm / (1.0 - qm)
        s += term
        peak = max(peak, term)
        m += 1
        if m >= _MIN_TERMS and term < _TAIL * max(s, 1e-300) and term <= peak:
            break
    return 1.0 - coef * s


def discriminant_delta(q: float) -> float:
    """Modular discriminant via the theta-product form."""
    if not 0.0 <= q < 1.0:
        raise DomainError(f"nome must be in [0,1), got {q}")
    if q == 0.0:
        return 0.0
    t2, t3, t4 = (jacobi_theta(i, q) for i in (2, 3, 4))
    return (t2 * t3 * t4) ** 8 / 256.0


def discriminant_delta_eisenstein(q: float) -> float:
    """Same quantity from the weight-4/6 Eisenstein combination; kept as an
    independent route for consistency checks."""
    if not 0.0 <= q < 1.0:
        raise DomainError(f"nome must be in [0,1), got {q}")
    if q == 0.0:
        return 0.0
    e4 = eisenstein(4, q)
    e6 = eisenstein(6, q)
    return (e4**3 - e6**2) / 1728.0


def theta_polynomial_value(poly: ThetaPolynomial, y: float) -> float:
    """Evaluate an even-unimodular theta polynomial at nome e^(-pi y)."""
    if y <= 0:
        raise DomainError("y must be positive")
    q = math.exp(-math.pi * y)
    e4 = eisenstein(4, q)
    dl = discriminant_delta(q)
    val = e4 ** (3 * poly.m + poly.k)
    for j in range(1, poly.m + 1):
        val += float(poly.b[j - 1]) * e4 ** (3 * (poly.m - j) + poly.k) * dl**j
    return val


# ---------------------------------------------------------------------------
# Theta evaluators (callables y -> theta value)


def evaluator_for_lattice(lat: Lattice, dualize_below: float = 0.5) -> Callable[[float], float]:
    """Enumeration-backed theta evaluator; small y is routed through the
    dual side of the transformation formula so the point count stays
    bounded over the whole search range."""
    dual_holder: list[Lattice] = []
    vol = float(lat.volume)
    n = lat.rank

    def ev(y: float) -> float:
        if y <= 0:
            raise DomainError("y must be positive")
        if y >= dualize_below:
            return theta_enum(lat, y)
        if not dual_holder:
            dual_holder.append(lat.dual())
        return (1.0 / vol) * y ** (-n / 2.0) * theta_enum(dual_holder[0], 1.0 / y)

    return ev


def evaluator_closed_form(name: str) -> Callable[[float], float]:
    return lambda y: theta_closed_form(name, y)


def evaluator_polynomial(poly: ThetaPolynomial) -> Callable[[float], float]:
    """Evaluator for an even-unimodular theta polynomial.

    Below y = 1 the self-dual transformation Theta(y) = y^(-n/2) Theta(1/y)
    is applied, keeping the Lambert-series evaluation in its fast region.
    """

    def ev(y: float) -> float:
        if y <= 0:
            raise DomainError("y must be positive")
        if y >= 1.0:
            return theta_polynomial_value(poly, y)
        return y ** (-poly.n / 2.0) * theta_polynomial_value(poly, 1.0 / y)

    return ev


# ---------------------------------------------------------------------------
# Secrecy function and gains


def secrecy_function(
    theta_fn: Callable[[float], float], n: int, vol: float, y: float
) -> float:
    """Ratio of the equal-volume scaled-cubic theta to the lattice theta.

    Theta of c*Z^n at y equals theta of Z^n at c^2 y, with c = vol^(1/n).
    """
    if y <= 0:
        raise DomainError("y must be positive")
    lam2 = float(vol) ** (2.0 / n)
    numer = jacobi_theta(3, math.exp(-math.pi * lam2 * y)) ** n
    return numer / theta_fn(y)


def weak_secrecy_gain_numeric(
    theta_fn: Callable[[float], float],
    n: int,
    vol: float,
    check_symmetry: bool = True,
) -> tuple[float, float]:
    """(gain, symmetry point) for a lattice equivalent to its dual: the
    secrecy function evaluated at y0 = vol^(-2/n).

    With check_symmetry the candidate point is verified by comparing the
    secrecy function at y0*t and y0/t; lattices that fail get a
    SymmetryPointUnknownError and callers must use the strong gain.
    """
    y0 = float(vol) ** (-2.0 / n)
    if check_symmetry:
        for t in (2.0, 4.0):
            a = secrecy_function(theta_fn, n, vol, y0 * t)
            b = secrecy_function(theta_fn, n, vol, y0 / t)
            if abs(a - b) > 1e-6 * max(abs(a), abs(b)):
                raise SymmetryPointUnknownError(
                    f"secrecy function is not symmetric about vol^(-2/n)={y0:g}"
                )
    return secrecy_function(theta_fn, n, vol, y0), y0


@dataclass(frozen=True)
class SecrecyGain:
    """Weak and strong gains of one lattice with the conjectured-equality gap."""

    lattice: str
    weak: Fraction | float | None
    strong: float
    y0: float | None
    conjecture_gap: float | None

    @staticmethod
    def assemble(lattice: str, weak, strong: float, y0) -> "SecrecyGain":
        gap = None
        if weak is not None:
            gap = abs(strong - float(weak)) / float(weak)
        return SecrecyGain(lattice, weak, strong, y0, gap)


@dataclass(frozen=True)
class StrongGainResult:
    chi: float
    y_star: float
    flagged: bool  # True when the unimodality check failed and a grid scan was used


def strong_secrecy_gain(
    theta_fn: Callable[[float], float],
    n: int,
    vol: float,
    log10_lo: float = -4.0,
    log10_hi: float = 4.0,
    tol_log10: float = 1e-6,
) -> StrongGainResult:
    """Supremum of the secrecy function over y > 0.

    Golden-section search on log10(y) over [-40 dB, +40 dB] after a
    bracket check on a coarse grid; a non-unimodal profile falls back to a
    dense grid scan plus local refinement and flags the result.
    """

    def f(t: float) -> float:
        return secrecy_function(theta_fn, n, vol, 10.0**t)

    coarse = 33
    ts = [log10_lo + (log10_hi - log10_lo) * i / (coarse - 1) for i in range(coarse)]
    vals = [f(t) for t in ts]
    best = max(range(coarse), key=lambda i: vals[i])

    if vals[best] - min(vals) <= 1e-12 * abs(vals[best]):
        # flat profile: every y attains the supremum
        return StrongGainResult(chi=vals[best], y_star=1.0, flagged=False)

    # count strict local maxima to detect non-unimodal profiles; the
    # epsilon is relative so roundoff ripple on flat tails does not count
    eps = 1e-9 * abs(vals[best])
    local_max = 0
    for i in range(1, coarse - 1):
        if vals[i] > vals[i - 1] + eps and vals[i] > vals[i + 1] + eps:
            local_max += 1
    flagged = local_max > 1 or best in (0, coarse - 1)

    if flagged and local_max > 1:
        dense = 2001
        ts = [log10_lo + (log10_hi - log10_lo) * i / (dense - 1) for i in range(dense)]
        vals = [f(t) for t in ts]
        best = max(range(dense), key=lambda i: vals[i])

    step = ts[1] - ts[0]
    lo = max(log10_lo, ts[best] - step)
    hi = min(log10_hi, ts[best] + step)

    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol_log10:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    t_star = (a + b) / 2.0
    return StrongGainResult(chi=f(t_star), y_star=10.0**t_star, flagged=flagged)


# ---------------------------------------------------------------------------
# Mass-formula lower bound on the best gain per dimension


def secrecy_gain_lower_bound(n: int) -> float:
    """theta_3(e^-pi)^n / E_{n/2}(e^-pi): no even unimodular lattice of
    dimension n has a smaller theta at the symmetry point than the
    mass-weighted average, so the best gain is at least this."""
    if n < 8 or n % 8:
        raise ValueError("dimension must be a multiple of 8, at least 8")
    return theta3_at_exp_pi() ** n / eisenstein(n // 2, Q_EXP_PI)


def secrecy_gain_asymptotic(n: int) -> float:
    """Large-n form of the bound: theta_3(e^-pi)^n / 2 (the Eisenstein
    value at e^-pi tends to 2)."""
    return theta3_at_exp_pi() ** n / 2.0


# ---------------------------------------------------------------------------
# Transformation-formula residual (dual route consistency)


def jacobi_identity_residual(lat: Lattice, y: float) -> float:
    """Relative residual between the direct theta sum and the rescaled
    theta of the dual at 1/y; both sides by independent enumeration."""
    if y <= 0:
        raise DomainError("y must be positive")
    if lat.rank != lat.dim:
        raise ValueError("square basis required")
    direct = theta_enum(lat, y)
    vol = float(lat.volume)
    other = (1.0 / vol) * y ** (-lat.rank / 2.0) * theta_enum(lat.dual(), 1.0 / y)
    return abs(direct - other) / direct
