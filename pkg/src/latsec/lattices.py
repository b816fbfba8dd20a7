"""Exact lattice representation, Construction A, enumeration and decoding.

A lattice is stored as an exact rational basis plus a dyadic scale
exponent: the true generator matrix is ``basis * 2**(scale2/2)``.  This
keeps every squared norm rational (sqrt(2) never appears squared), so
theta-series coefficients and coset indices come out exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gamma, gcd, pi, prod, sqrt

import numpy as np

from . import exact
from .exact import Matrix, frac_matrix

DEFAULT_ENUM_CAP = 10_000_000


class LatticeError(Exception):
    pass


class UnsupportedRankError(LatticeError):
    """Operation needs a square basis."""


class EnumerationBudgetError(LatticeError):
    """Requested enumeration would exceed the configured point cap."""


class NotASublatticeError(LatticeError):
    """Claimed coarse lattice is not contained in the fine one."""


class UnsupportedQuotientError(LatticeError):
    """Quotient group size is not a power of two."""


# ---------------------------------------------------------------------------
# Binary codes


@dataclass(frozen=True)
class BinaryCode:
    """Linear binary code given by generator rows (each a 0/1 tuple)."""

    length: int
    rows: tuple[tuple[int, ...], ...]
    name: str | None = None

    def __post_init__(self):
        for r in self.rows:
            if len(r) != self.length or any(b not in (0, 1) for b in r):
                raise ValueError("generator rows must be 0/1 vectors of the code length")
        if exact.f2_rank(self.rows) != len(self.rows):
            raise ValueError("generator rows are linearly dependent over F2")

    @property
    def kappa(self) -> int:
        return len(self.rows)

    def codewords(self):
        """All 2^kappa codewords, message-order (row 0 is the LSB)."""
        k, n = self.kappa, self.length
        for msg in range(1 << k):
            w = [0] * n
            for i in range(k):
                if (msg >> i) & 1:
                    w = [a ^ b for a, b in zip(w, self.rows[i])]
            yield tuple(w)

    @cached_property
    def min_distance(self) -> int:
        if self.kappa == 0:
            raise ValueError("trivial code has no nonzero codeword")
        if self.kappa > 20:
            raise ValueError("exhaustive distance check limited to kappa <= 20")
        return min(sum(w) for w in self.codewords() if any(w))

    @cached_property
    def codeword_matrix(self) -> np.ndarray:
        return np.array(list(self.codewords()), dtype=np.int64)

    def dual(self) -> "BinaryCode":
        rows = exact.f2_nullspace(self.rows, self.length) if self.rows else [
            tuple(1 if i == j else 0 for j in range(self.length)) for i in range(self.length)
        ]
        return BinaryCode(self.length, tuple(rows), name=None)

    def params(self) -> tuple[int, int, int]:
        return (self.length, self.kappa, self.min_distance)

    @staticmethod
    def from_json(obj: dict) -> "BinaryCode":
        rows = tuple(tuple(int(c) for c in row) for row in obj["generator_rows"])
        code = BinaryCode(int(obj["n"]), rows, name=obj.get("name"))
        if code.kappa != int(obj["kappa"]):
            raise ValueError("kappa does not match generator rank")
        return code

    def to_json(self) -> dict:
        return {
            "n": self.length,
            "kappa": self.kappa,
            "generator_rows": ["".join(str(b) for b in r) for r in self.rows],
            **({"name": self.name} if self.name else {}),
        }


def universe_code(n: int) -> BinaryCode:
    rows = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    return BinaryCode(n, rows, name=f"({n},{n},1)")


def parity_check_code(n: int) -> BinaryCode:
    """Even-weight code (n, n-1, 2)."""
    rows = tuple(
        tuple(1 if j in (i, i + 1) else 0 for j in range(n)) for i in range(n - 1)
    )
    return BinaryCode(n, rows, name=f"({n},{n-1},2)")


def repetition_code(n: int) -> BinaryCode:
    return BinaryCode(n, (tuple([1] * n),), name=f"({n},1,{n})")


# ---------------------------------------------------------------------------
# Lattices


@dataclass(frozen=True)
class Lattice:
    """Rational-basis lattice, true coordinates = basis * 2**(scale2/2).

    ca_code / ca_frame2 record that the point set equals
    2**(ca_frame2/2) * (2Z^n + C); decoders use this as a fast exact path.
    """

    basis: Matrix
    scale2: int = 0
    name: str | None = None
    ca_code: BinaryCode | None = field(default=None, compare=False)
    ca_frame2: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "basis", frac_matrix(self.basis))
        if self.rank > self.dim:
            raise ValueError("more basis rows than ambient dimensions")

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis[0])

    @cached_property
    def gram(self) -> Matrix:
        """Exact Gram matrix of the true basis (includes the 2**scale2 factor)."""
        g = exact.mat_mul(self.basis, exact.transpose(self.basis))
        s = Fraction(2) ** self.scale2
        return tuple(tuple(x * s for x in row) for row in g)

    @cached_property
    def volume_squared(self) -> Fraction:
        d = exact.det(self.gram)
        if d <= 0:
            raise ValueError("basis rows are linearly dependent")
        return d

    @cached_property
    def volume(self):
        """Fundamental volume; exact Fraction when the Gram determinant is a
        perfect square, float otherwise."""
        r = exact.rational_sqrt(self.volume_squared)
        return r if r is not None else sqrt(self.volume_squared)

    @cached_property
    def basis_true(self) -> np.ndarray:
        b = np.array([[float(x) for x in row] for row in self.basis])
        return b * 2.0 ** (self.scale2 / 2.0)

    @cached_property
    def _basis_inv(self) -> Matrix:
        if self.rank != self.dim:
            raise UnsupportedRankError("square basis required")
        return exact.inverse(self.basis)

    def norm2(self, coords) -> Fraction:
        """Exact squared norm of the point with the given integer coordinates."""
        v = exact.vec_mat(tuple(Fraction(c) for c in coords), self.gram)
        return sum(x * y for x, y in zip(coords, v))

    def to_true(self, coords) -> np.ndarray:
        return np.asarray(coords, dtype=float) @ self.basis_true

    def point(self, coords) -> "LatticePoint":
        return LatticePoint(tuple(int(c) for c in coords), self)

    def scaled_pow2(self, k2: int, name: str | None = None) -> "Lattice":
        """Scale by 2**(k2/2); k2 = 2 doubles the lattice."""
        return Lattice(
            self.basis,
            self.scale2 + k2,
            name=name,
            ca_code=self.ca_code,
            ca_frame2=self.ca_frame2 + k2,
        )

    def dual(self) -> "Lattice":
        if self.rank != self.dim:
            raise UnsupportedRankError("dual needs a square basis")
        dual_code = None
        dual_frame2 = 0
        if self.ca_code is not None:
            # (2^(e/2) (2Z^n + C))* = 2^((-e-2)/2) (2Z^n + C_perp)
            dual_code = self.ca_code.dual()
            dual_frame2 = -self.ca_frame2 - 2
        nm = f"{self.name}*" if self.name else None
        return Lattice(
            exact.transpose(self._basis_inv),
            -self.scale2,
            name=nm,
            ca_code=dual_code,
            ca_frame2=dual_frame2,
        )

    # -- enumeration helpers ------------------------------------------------

    @cached_property
    def _gram_int(self) -> tuple[np.ndarray, int]:
        """(den * gram) as an int64 array together with den."""
        den = 1
        for row in self.gram:
            for x in row:
                den = den * x.denominator // gcd(den, x.denominator)
        gi = np.array(
            [[int(x * den) for x in row] for row in self.gram], dtype=np.int64
        )
        return gi, den

    @cached_property
    def _chol(self) -> np.ndarray:
        g = np.array([[float(x) for x in row] for row in self.gram])
        return np.linalg.cholesky(g)


@dataclass(frozen=True)
class LatticePoint:
    coords: tuple[int, ...]
    lattice: Lattice

    @cached_property
    def ambient(self) -> np.ndarray:
        return self.lattice.to_true(self.coords)

    @cached_property
    def norm2(self) -> Fraction:
        return self.lattice.norm2(self.coords)

    def __add__(self, other: "LatticePoint") -> "LatticePoint":
        if other.lattice != self.lattice:
            raise ValueError("points live in different lattices")
        return LatticePoint(
            tuple(a + b for a, b in zip(self.coords, other.coords)), self.lattice
        )


# ---------------------------------------------------------------------------
# Construction A


def construction_a(code: BinaryCode, name: str | None = None) -> Lattice:
    """Lattice of all integer vectors congruent mod 2 to a codeword.

    Basis: generator rows lifted to {0,1} integers, completed with the
    doubled unit vectors, reduced to a canonical full-rank form.
    """
    n = code.length
    rows = [list(r) for r in code.rows]
    rows += [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    h = exact.hermite_normal_form(rows)
    if name is None and code.name is not None:
        name = f"2Z{n}+{code.name}"
    return Lattice(frac_matrix(h), 0, name=name, ca_code=code)


# ---------------------------------------------------------------------------
# Point enumeration (layered sphere enumeration with exact norm binning)


def _enum_traverse(lat: Lattice, radius2: float, visit, half: bool):
    """Depth-first traversal of all integer coords u with |u B_true|^2 <= radius2.

    ``visit(prefix, lo, hi, partial, row0)`` is called once per innermost
    range: coordinates are prefix + [u0] for u0 in [lo, hi]; the squared
    norm is partial + (row0[0]*u0 + off)^2 where off is baked into visit
    via the returned arrays.  With half=True only representatives with the
    outermost nonzero coordinate positive are visited (callers double the
    counts of nonzero points).
    """
    chol = lat._chol  # lower triangular, gram = L L^T
    m = lat.rank
    # Work with R = L^T (upper triangular): |u|^2 = sum_i (sum_{j>=i} R[i,j] u_j)^2
    R = chol.T.copy()
    eps = 1e-9 * max(radius2, 1.0)
    budget = radius2 + eps

    u = [0] * m
    # center[i] = -(sum_{j>i} R[i,j]u_j)/R[i,i]
    def rec(level: int, rem: float, zero_prefix: bool):
        # rem = budget - contribution of levels > level
        c = -sum(R[level][j] * u[j] for j in range(level + 1, m)) / R[level][level]
        hw = sqrt(max(rem, 0.0)) / R[level][level]
        lo = int(np.ceil(c - hw - 1e-12))
        hi = int(np.floor(c + hw + 1e-12))
        if zero_prefix and half:
            lo = max(lo, 0)
        if lo > hi:
            return
        if level == 0:
            visit(tuple(u[1:]), lo, hi, budget - rem, R[0][0], c, zero_prefix)
            return
        for v in range(lo, hi + 1):
            u[level] = v
            t = R[level][level] * (v - c)
            rec(level - 1, rem - t * t, zero_prefix and v == 0)
        u[level] = 0

    rec(m - 1, budget, True)


def _shell_counts(lat: Lattice, radius2: Fraction, cap: int) -> dict[Fraction, int]:
    """Exact point counts per squared norm for all norms <= radius2.

    Layered sphere enumeration; the two innermost coordinates are handled
    with flat numpy ranges, upper layers recurse in Python.  Only points
    whose outermost nonzero coordinate is positive are visited; nonzero
    points count twice (the lattice is symmetric under negation).
    """
    _, den = lat._gram_int
    rmax = int(radius2 * den)
    # fail fast when the ball obviously holds more points than the cap
    est = pi ** (lat.rank / 2) / gamma(lat.rank / 2 + 1) * float(radius2) ** (
        lat.rank / 2
    ) / float(lat.volume)
    if est > 1.3 * cap:
        raise EnumerationBudgetError(
            f"~{est:.2g} points inside radius, cap is {cap}"
        )
    counts = np.zeros(rmax + 2, dtype=np.float64)
    m = lat.rank
    Rn = lat._chol.T  # upper triangular, gram = R^T R
    R = [[float(x) for x in row] for row in Rn]
    r00, r11 = R[0][0], (R[1][1] if m > 1 else 1.0)
    r01 = R[0][1] if m > 1 else 0.0
    eps = 1e-9 * max(float(radius2), 1.0)
    budget = float(radius2) + eps
    total = 0

    if m == 1:
        hw = sqrt(budget) / r00
        v = np.arange(0, int(np.floor(hw + 1e-12)) + 1, dtype=np.float64)
        norms = (r00 * v) ** 2
        scaled = np.rint(norms * den).astype(np.int64)
        keep = scaled <= rmax
        w = np.where(v[keep] > 0, 2.0, 1.0)
        counts[:] += np.bincount(scaled[keep], weights=w, minlength=rmax + 2)
        return {Fraction(i, den): int(round(c)) for i, c in enumerate(counts[: rmax + 1]) if c}

    # Phase 1: Python recursion over levels m-1..2 collects two-coordinate
    # subproblems (row sums a0, a1, remaining budget, used norm, half-space flag).
    A0: list[float] = []
    A1: list[float] = []
    REM: list[float] = []
    USED: list[float] = []
    ZP: list[bool] = []

    if m == 2:
        A0.append(0.0)
        A1.append(0.0)
        REM.append(budget)
        USED.append(0.0)
        ZP.append(True)
    else:
        ceil_, floor_ = np.ceil, np.floor
        # cols[j][i] = R[i][j]: fixing u_j = v adds cols[j][i]*v to row i's sum
        cols = [[R[i][j] for i in range(m)] for j in range(m)]
        acc = [[0.0] * m for _ in range(m + 1)]

        def rec(level: int, rem: float, used: float, zero_prefix: bool):
            a = acc[level + 1]
            col = cols[level]
            rll = R[level][level]
            c = -a[level] / rll
            hw = sqrt(rem if rem > 0 else 0.0) / rll
            lo = int(ceil_(c - hw - 1e-12))
            hi = int(floor_(c + hw + 1e-12))
            if zero_prefix:
                lo = max(lo, 0)
            for v in range(lo, hi + 1):
                t = rll * (v - c)
                tsq = t * t
                rem2 = rem - tsq
                if rem2 < -eps:
                    continue
                if rem2 < 0.0:
                    rem2 = 0.0
                zp = zero_prefix and v == 0
                if level == 2:
                    A0.append(a[0] + col[0] * v)
                    A1.append(a[1] + col[1] * v)
                    REM.append(rem2)
                    USED.append(used + tsq)
                    ZP.append(zp)
                else:
                    nxt = acc[level]
                    for i in range(level):
                        nxt[i] = a[i] + col[i] * v
                    rec(level - 1, rem2, used + tsq, zp)

        rec(m - 1, budget, 0.0, True)

    # Phase 2: expand the two innermost coordinates with flat numpy ranges.
    a0_all = np.array(A0)
    a1_all = np.array(A1)
    rem_all = np.array(REM)
    used_all = np.array(USED)
    zp_all = np.array(ZP, dtype=bool)

    chunk = 40_000
    for start in range(0, len(a0_all), chunk):
        sl = slice(start, start + chunk)
        a0, a1 = a0_all[sl], a1_all[sl]
        rem, used, zp = rem_all[sl], used_all[sl], zp_all[sl]

        c1 = -a1 / r11
        hw1 = np.sqrt(rem) / r11
        lo1 = np.ceil(c1 - hw1 - 1e-12).astype(np.int64)
        hi1 = np.floor(c1 + hw1 + 1e-12).astype(np.int64)
        lo1 = np.where(zp, np.maximum(lo1, 0), lo1)
        lens1 = np.maximum(hi1 - lo1 + 1, 0)
        tot1 = int(lens1.sum())
        if tot1 == 0:
            continue
        seg1 = np.repeat(np.arange(len(a0)), lens1)
        off1 = np.concatenate(([0], np.cumsum(lens1)[:-1]))
        v1 = (np.arange(tot1) - off1[seg1]) + lo1[seg1]
        t1sq = (r11 * (v1 - c1[seg1])) ** 2
        rem0 = rem[seg1] - t1sq
        keep = rem0 >= -eps
        if not keep.all():
            v1, t1sq, rem0, seg1 = v1[keep], t1sq[keep], rem0[keep], seg1[keep]
        if len(v1) == 0:
            continue
        np.clip(rem0, 0.0, None, out=rem0)
        c0 = -(a0[seg1] + r01 * v1) / r00
        hw0 = np.sqrt(rem0) / r00
        lo0 = np.ceil(c0 - hw0 - 1e-12).astype(np.int64)
        hi0 = np.floor(c0 + hw0 + 1e-12).astype(np.int64)
        zslice = zp[seg1] & (v1 == 0)
        lo0 = np.where(zslice, np.maximum(lo0, 0), lo0)
        lens0 = np.maximum(hi0 - lo0 + 1, 0)
        tot0 = int(lens0.sum())
        total += tot0
        if total > cap:
            raise EnumerationBudgetError(f"enumeration exceeds cap of {cap} points")
        if tot0 == 0:
            continue
        seg0 = np.repeat(np.arange(len(v1)), lens0)
        off0 = np.concatenate(([0], np.cumsum(lens0)[:-1]))
        v0 = (np.arange(tot0) - off0[seg0]) + lo0[seg0]
        norms = (used[seg1] + t1sq)[seg0] + (r00 * (v0 - c0[seg0])) ** 2
        w = np.where(zslice[seg0] & (v0 == 0), 1.0, 2.0)
        scaled = np.rint(norms * den).astype(np.int64)
        np.clip(scaled, 0, rmax + 1, out=scaled)  # overflow bucket rmax+1
        counts[:] += np.bincount(scaled, weights=w, minlength=rmax + 2)

    return {
        Fraction(i, den): int(round(c)) for i, c in enumerate(counts[: rmax + 1]) if c
    }


# one cached enumeration per lattice, at the largest radius seen so far
_SHELL_CACHE: dict[Lattice, tuple[int, dict[Fraction, int]]] = {}


def enumerate_shells(
    lat: Lattice, radius2, cap: int = DEFAULT_ENUM_CAP
) -> dict[Fraction, int]:
    """Map squared norm -> number of lattice points, complete up to radius2."""
    _, den = lat._gram_int
    rscaled = int(Fraction(radius2) * den)
    cached = _SHELL_CACHE.get(lat)
    if cached is None or cached[0] < rscaled:
        shells = _shell_counts(lat, Fraction(rscaled, den), cap)
        if len(_SHELL_CACHE) > 48:
            _SHELL_CACHE.clear()
        _SHELL_CACHE[lat] = (rscaled, shells)
        cached = (rscaled, shells)
    return {r: c for r, c in cached[1].items() if r * den <= rscaled}


def enumerate_points(
    lat: Lattice, radius2, cap: int = DEFAULT_ENUM_CAP
) -> list[LatticePoint]:
    """All lattice points with squared norm <= radius2, sorted by coordinates."""
    if radius2 < 0:
        raise ValueError("radius must be nonnegative")
    gi, den = lat._gram_int
    rmax = int(Fraction(radius2) * den)
    out: list[tuple[int, ...]] = []
    total = 0

    def visit(prefix, lo, hi, used, r00, c, zero_prefix):
        nonlocal total
        for v in range(lo, hi + 1):
            coords = (v,) + prefix
            t = used + (r00 * (v - c)) ** 2
            if round(t * den) <= rmax:
                out.append(coords)
                total += 1
                if not zero_prefix or v > 0:  # origin is its own mirror
                    out.append(tuple(-x for x in coords))
                    total += 1
                if total > cap:
                    raise EnumerationBudgetError(f"enumeration exceeds cap of {cap} points")

    _enum_traverse(lat, float(Fraction(radius2)), visit, half=True)
    return [LatticePoint(c, lat) for c in sorted(out)]


def min_norm_and_kissing(lat: Lattice, cap: int = DEFAULT_ENUM_CAP):
    """(smallest nonzero squared norm, number of vectors achieving it)."""
    diag = _diagonal_scale(lat)
    if diag is not None:
        return diag * diag * Fraction(2) ** lat.scale2, 2 * lat.dim
    # grow the radius until a nonzero shell appears
    r = min(lat.gram[i][i] for i in range(lat.rank))
    while True:
        shells = enumerate_shells(lat, r, cap)
        nonzero = sorted(k for k in shells if k > 0)
        if nonzero:
            return nonzero[0], shells[nonzero[0]]
        r *= 2


def _diagonal_scale(lat: Lattice) -> Fraction | None:
    """c such that basis == c * I, else None."""
    if lat.rank != lat.dim:
        return None
    c = lat.basis[0][0]
    for i, row in enumerate(lat.basis):
        for j, x in enumerate(row):
            if (i == j and x != c) or (i != j and x != 0):
                return None
    return c


# ---------------------------------------------------------------------------
# Closest-point decoding


def closest_point(lat: Lattice, y) -> LatticePoint:
    """Nearest lattice point to the real vector y (ties: smallest coords)."""
    y = np.asarray(y, dtype=float)
    if y.shape != (lat.dim,):
        raise ValueError(f"target must have dimension {lat.dim}")
    diag = _diagonal_scale(lat)
    if diag is not None:
        step = float(diag) * 2.0 ** (lat.scale2 / 2.0)
        coords = np.ceil(y / step - 0.5).astype(np.int64)  # half-ties go down
        return LatticePoint(tuple(int(c) for c in coords), lat)
    if lat.ca_code is not None:
        u = _decode_construction_a(lat, y[None, :])[0]
        return LatticePoint(tuple(int(c) for c in u), lat)
    return LatticePoint(_sphere_decode(lat, y), lat)


def _decode_construction_a(lat: Lattice, ys: np.ndarray) -> np.ndarray:
    """Vectorized CVP for 2Z^n + C style lattices (any dyadic scale).

    ys: (batch, n) true coordinates.  Returns integer coords in lat's basis.
    """
    code = lat.ca_code
    scale = 2.0 ** (lat.ca_frame2 / 2.0)
    yf = ys / scale  # work in the integer code frame
    cw = code.codeword_matrix  # (M, n)
    # nearest point of c + 2Z^n per coordinate: c + 2*round((y-c)/2)
    z = np.ceil((yf[:, None, :] - cw[None, :, :]) / 2.0 - 0.5)
    cand = cw[None, :, :] + 2.0 * z  # (batch, M, n)
    d2 = ((yf[:, None, :] - cand) ** 2).sum(axis=2)
    best = np.argmin(d2, axis=1)
    pts = cand[np.arange(len(ys)), best]  # integer frame points
    # frame -> basis coordinates: u = (pts * scale) @ (basis * 2^(s/2))^-1
    binv = np.array(
        [[float(x) for x in row] for row in exact.inverse(lat.basis)]
    ) * 2.0 ** ((lat.ca_frame2 - lat.scale2) / 2.0)
    coords = np.rint(pts @ binv).astype(np.int64)
    # ties across codewords: keep the lexicographically smallest basis coords
    dmin = d2[np.arange(len(ys)), best]
    tie_rows = np.where((d2 <= dmin[:, None] * (1 + 1e-12) + 1e-12).sum(axis=1) > 1)[0]
    for i in tie_rows:
        ties = np.where(d2[i] <= dmin[i] * (1 + 1e-12) + 1e-12)[0]
        opts = [tuple(np.rint(cand[i, j] @ binv).astype(np.int64)) for j in ties]
        coords[i] = min(opts)
    return coords


def _sphere_decode(lat: Lattice, y: np.ndarray) -> tuple[int, ...]:
    """Generic depth-first sphere decoder (Babai start, shrinking radius)."""
    bt = lat.basis_true
    m = lat.rank
    # y ~ u @ bt ; solve least squares for the Babai estimate
    u_ls, *_ = np.linalg.lstsq(bt.T, y, rcond=None)
    babai = np.rint(u_ls).astype(np.int64)
    best = tuple(int(x) for x in babai)
    best_d = float(((babai @ bt - y) ** 2).sum())

    g = bt @ bt.T
    L = np.linalg.cholesky(g)
    R = L.T
    # target in the triangular frame: y = u @ bt; project
    # solve bt.T w = y  ->  w = coordinates of y in the basis (real)
    w, *_ = np.linalg.lstsq(bt.T, y, rcond=None)

    u = [0] * m
    eps = 1e-12

    def rec(level: int, rem: float):
        nonlocal best, best_d
        # minimize (R[l][l]*(u_l - w_l) + sum_{j>l} R[l][j](u_j - w_j))^2 over u_l
        off = sum(R[level][j] * (u[j] - w[j]) for j in range(level + 1, m))
        center = w[level] - off / R[level][level]
        hw = sqrt(max(rem, 0.0)) / R[level][level]
        lo = int(np.ceil(center - hw - eps))
        hi = int(np.floor(center + hw + eps))
        for v in range(lo, hi + 1):
            t = R[level][level] * (v - center)
            d = t * t
            if d > rem + eps:
                continue
            u[level] = v
            if level == 0:
                cand = tuple(u)
                # recompute the distance directly for robustness
                dd = float(((np.array(cand) @ bt - y) ** 2).sum())
                if dd < best_d - 1e-12 or (
                    abs(dd - best_d) <= 1e-12 * max(best_d, 1.0) and cand < best
                ):
                    best, best_d = cand, min(dd, best_d)
            else:
                rec(level - 1, rem - d)
        u[level] = 0

    # iterate with the shrinking radius seeded by the Babai distance
    rec(m - 1, best_d * (1 + 1e-9) + 1e-12)
    return best


# ---------------------------------------------------------------------------
# Coset labeling


def containment_matrix(fine: Lattice, coarse: Lattice) -> list[list[int]]:
    """Integer T with coarse basis (true) = T @ fine basis (true).

    Raises NotASublatticeError if the coarse lattice is not contained in
    the fine one as a point set.
    """
    if fine.dim != coarse.dim or fine.rank != fine.dim or coarse.rank != coarse.dim:
        raise UnsupportedRankError("containment needs square bases of equal dimension")
    dp = coarse.scale2 - fine.scale2
    if dp % 2 != 0:
        raise NotASublatticeError("scale mismatch cannot give an integer embedding")
    x = exact.mat_mul(coarse.basis, exact.inverse(fine.basis))
    s = Fraction(2) ** (dp // 2)
    t = []
    for row in x:
        r = []
        for v in row:
            v = v * s
            if v.denominator != 1:
                raise NotASublatticeError("coarse basis has non-integer coordinates")
            r.append(int(v))
        t.append(r)
    return t


class CosetLabeling:
    """Canonical labeling of fine/coarse cosets from the Smith normal form.

    Digits of a point with fine-basis coordinates u are (u @ V) mod d,
    flattened row-major into an integer label.
    """

    def __init__(self, fine: Lattice, coarse: Lattice):
        t = containment_matrix(fine, coarse)
        u, d, v = exact.smith_normal_form(t)
        self.fine = fine
        self.coarse = coarse
        self.diag = d
        self.size = prod(d)
        if self.size & (self.size - 1):
            raise UnsupportedQuotientError(
                f"quotient has size {self.size}, not a power of two"
            )
        self.k = self.size.bit_length() - 1
        self._v = np.array(v, dtype=np.int64)
        self._v_inv = np.array(
            [[int(x) for x in row]
             for row in exact.inverse(frac_matrix(v))],
            dtype=np.int64,
        )
        self._d = np.array(d, dtype=np.int64)
        self._weights = np.array(
            [prod(d[i + 1:]) for i in range(len(d))], dtype=np.int64
        )

    def label_coords(self, coords) -> int:
        u = np.asarray(coords, dtype=np.int64)
        digits = (u @ self._v) % self._d
        return int((digits * self._weights).sum())

    def label_coords_batch(self, coords: np.ndarray) -> np.ndarray:
        digits = (coords @ self._v) % self._d
        return (digits * self._weights).sum(axis=1)

    def coords_for_label(self, label: int) -> tuple[int, ...]:
        if not 0 <= label < self.size:
            raise ValueError("label out of range")
        digits = []
        for w, d in zip(self._weights, self._d):
            digits.append((label // int(w)) % int(d))
        u = np.array(digits, dtype=np.int64) @ self._v_inv
        return tuple(int(x) for x in u)


def coset_label(fine: Lattice, coarse: Lattice, point: LatticePoint | tuple) -> int:
    coords = point.coords if isinstance(point, LatticePoint) else tuple(point)
    return CosetLabeling(fine, coarse).label_coords(coords)


# ---------------------------------------------------------------------------
# Catalog


def integer_lattice(n: int) -> Lattice:
    return Lattice(exact.identity(n), 0, name=f"Z{n}")


def checkerboard_lattice(n: int) -> Lattice:
    """D_n: integer vectors with even coordinate sum."""
    code = repetition_code(2) if n == 2 else parity_check_code(n)
    return construction_a(code, name=f"D{n}")


def gosset_lattice() -> Lattice:
    """E8, realized as the Construction-A lattice of the (8,4,4) code
    scaled down by sqrt(2) (unimodular, even)."""
    lat = construction_a(reed_muller_8_4_4())
    return Lattice(lat.basis, -1, name="E8", ca_code=lat.ca_code, ca_frame2=-1)


def gosset_lattice_standard_basis() -> Lattice:
    """E8 in its textbook half-integer basis (for cross-checks)."""
    rows = [
        [2, 0, 0, 0, 0, 0, 0, 0],
        [-1, 1, 0, 0, 0, 0, 0, 0],
        [0, -1, 1, 0, 0, 0, 0, 0],
        [0, 0, -1, 1, 0, 0, 0, 0],
        [0, 0, 0, -1, 1, 0, 0, 0],
        [0, 0, 0, 0, -1, 1, 0, 0],
        [0, 0, 0, 0, 0, -1, 1, 0],
        [Fraction(1, 2)] * 8,
    ]
    return Lattice(frac_matrix(rows), 0, name="E8(std)")


_G_ROWS = (
    (0, 0, 0, 0, 0, 0, 0, 1),
    (0, 0, 0, 1, 0, 0, 0, 1),
    (0, 0, 0, 0, 0, 0, 1, 1),
    (0, 0, 0, 0, 0, 1, 0, 1),
    (0, 0, 1, 1, 0, 0, 1, 1),
    (0, 1, 0, 1, 0, 1, 0, 1),
    (0, 0, 0, 0, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 1, 1),
)


def nested_code_tower_matrix() -> tuple[tuple[int, ...], ...]:
    """8x8 binary matrix whose last kappa rows generate the (8,kappa) code
    of the nested 8-dimensional lattice tower."""
    return _G_ROWS


def tower_code(kappa: int) -> BinaryCode:
    """(8, kappa) code of the nested tower: the last kappa rows of the
    tower matrix."""
    if not 0 <= kappa <= 8:
        raise ValueError("kappa must be in 0..8")
    if kappa == 0:
        raise ValueError("the zero code has no generator rows")
    rows = _G_ROWS[8 - kappa:]
    return BinaryCode(8, rows, name=f"(8,{kappa})")


def reed_muller_8_4_4() -> BinaryCode:
    return BinaryCode(8, _G_ROWS[4:], name="(8,4,4)")


def l8_lattice() -> Lattice:
    """The 8-dimensional lattice built from the (8,5,2) tower code."""
    return construction_a(tower_code(5), name="L8")


def lattice_from_json(obj: dict) -> Lattice:
    basis = tuple(
        tuple(Fraction(s) if isinstance(s, str) else Fraction(s) for s in row)
        for row in obj["basis"]
    )
    return Lattice(basis, int(obj.get("scale2", 0)), name=obj.get("name"))


def lattice_to_json(lat: Lattice) -> dict:
    return {
        "name": lat.name,
        "basis": [[str(x) for x in row] for row in lat.basis],
        "scale2": lat.scale2,
    }


def load_catalog_file(path) -> dict[str, Lattice]:
    with open(path) as fh:
        data = json.load(fh)
    return {obj["name"]: lattice_from_json(obj) for obj in data["lattices"]}


def catalog() -> dict[str, Lattice]:
    """Named lattices with explicit bases (enumerable, n <= 8)."""
    cat: dict[str, Lattice] = {}
    for n in range(1, 9):
        cat[f"Z{n}"] = integer_lattice(n)
    for n in (2, 4, 8):
        cat[f"D{n}"] = checkerboard_lattice(n)
    cat["E8"] = gosset_lattice()
    cat["L8"] = l8_lattice()
    cat["D4^2"] = construction_a(tower_code(6), name="D4^2")
    return cat


def catalog_lookup(name: str) -> Lattice:
    name = name.strip()
    cat = catalog()
    if name in cat:
        return cat[name]
    if name.upper().startswith("Z") and name[1:].isdigit():
        return integer_lattice(int(name[1:]))
    if name.upper().startswith("D") and name[1:].isdigit():
        return checkerboard_lattice(int(name[1:]))
    raise KeyError(f"unknown lattice {name!r}")
