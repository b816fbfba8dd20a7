"""Coset coding over nested lattice pairs and the 8-dimensional multilevel
encoders built on the nested binary code tower.

The coset encoder maps k data bits to a coset of the coarse lattice inside
the fine one and transmits a random member of that coset.  The multilevel
encoder writes blocks of bits through the code tower so that earlier bits
land in lattices with smaller minimum distance: worst for reliability,
best for secrecy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cache, cached_property
from importlib import resources
from math import log2

import numpy as np

from . import exact
from .lattices import (
    CosetLabeling,
    Lattice,
    LatticePoint,
    UnsupportedQuotientError,
    closest_point,
    construction_a,
    containment_matrix,
    gosset_lattice,
    integer_lattice,
    nested_code_tower_matrix,
    tower_code,
)

TWO_PI = 2.0 * np.pi
DEFAULT_COORD_BOX = 4


@dataclass(frozen=True)
class CosetCode:
    """Nested pair with its quotient labeling and minimum-energy leaders."""

    fine: Lattice
    coarse: Lattice
    labeling: CosetLabeling

    @property
    def k(self) -> int:
        return self.labeling.k

    @property
    def dim(self) -> int:
        return self.fine.dim

    @cached_property
    def representatives(self) -> tuple[LatticePoint, ...]:
        """Minimum-energy leader per coset, indexed by label."""
        binv = np.linalg.inv(self.fine.basis_true)
        reps = []
        for label in range(self.labeling.size):
            u = self.labeling.coords_for_label(label)
            x = np.asarray(self.fine.point(u).ambient, dtype=float)
            t = closest_point(self.coarse, x)
            leader = x - t.ambient
            # back to fine coordinates (exact integers, recovered via floats)
            coords = tuple(int(round(c)) for c in leader @ binv)
            reps.append(self.fine.point(coords))
        return tuple(reps)

    def label_of(self, point: LatticePoint | tuple) -> int:
        coords = point.coords if isinstance(point, LatticePoint) else tuple(point)
        return self.labeling.label_coords(coords)


def build_coset_code(fine: Lattice, coarse: Lattice) -> CosetCode:
    labeling = CosetLabeling(fine, coarse)
    if labeling.size.bit_length() - 1 > 20:
        raise UnsupportedQuotientError("quotient too large to materialize leaders")
    return CosetCode(fine, coarse, labeling)


def bits_to_label(bits) -> int:
    label = 0
    for b in bits:
        label = (label << 1) | int(b)
    return label


def label_to_bits(label: int, k: int) -> tuple[int, ...]:
    return tuple((label >> (k - 1 - i)) & 1 for i in range(k))


def encode(code: CosetCode, data_bits, rng, box: int = DEFAULT_COORD_BOX) -> LatticePoint:
    """data bits -> leader of the labeled coset plus a random coarse point.

    The random point has coarse-basis coordinates drawn uniformly from
    [-box, box]; the infinite-constellation analysis stays an upper bound.
    """
    data_bits = tuple(int(b) for b in data_bits)
    if len(data_bits) != code.k:
        raise ValueError(f"need exactly {code.k} data bits")
    label = bits_to_label(data_bits)
    leader = code.representatives[label]
    r = rng.integers(-box, box + 1, size=code.dim)
    # coarse point in fine coordinates
    t = exact.mat_mul(
        (tuple(Fraction(int(v)) for v in r),),
        _coarse_in_fine(code),
    )[0]
    coords = tuple(a + int(b) for a, b in zip(leader.coords, t))
    return code.fine.point(coords)


@cache
def _coarse_in_fine_cached(fine: Lattice, coarse: Lattice):
    return exact.frac_matrix(containment_matrix(fine, coarse))


def _coarse_in_fine(code: CosetCode):
    return _coarse_in_fine_cached(code.fine, code.coarse)


def coset_decode(code: CosetCode, y) -> tuple[int, ...]:
    """Nearest fine-lattice point, then the coset label as k bits."""
    p = closest_point(code.fine, np.asarray(y, dtype=float))
    return label_to_bits(code.label_of(p), code.k)


# ---------------------------------------------------------------------------
# Rates and operating point


@dataclass(frozen=True)
class RatePlan:
    """Bit accounting per codeword: total rate splits into data and random
    parts, two bits per complex channel use per unit rate."""

    n: int
    data_rate: float
    random_rate: float

    @property
    def total_rate(self) -> float:
        return self.data_rate + self.random_rate

    @property
    def data_bits(self) -> float:
        return self.n * self.data_rate / 2

    @property
    def random_bits(self) -> float:
        return self.n * self.random_rate / 2

    @staticmethod
    def from_bits(n: int, k: float, r: float) -> "RatePlan":
        return RatePlan(n, 2 * k / n, 2 * r / n)


@dataclass(frozen=True)
class RandomBitRate:
    value: float
    clamped: bool


def random_bit_rate(gamma_eve_db: float) -> RandomBitRate:
    """Random-bit rate needed at the design point for an eavesdropper SNR
    given in dB; clamped at zero below the break-even SNR of 2*pi."""
    raw = (gamma_eve_db / 10.0) * log2(10.0) - log2(TWO_PI)
    if raw < 0:
        return RandomBitRate(0.0, True)
    return RandomBitRate(raw, False)


def operating_point(lat: Lattice) -> float:
    """vol^(-2/n): where the secrecy function of a dual-equivalent lattice
    is symmetric, hence where the system should run."""
    return float(lat.volume_squared) ** (-1.0 / lat.dim)


def gsnr(lat: Lattice, sigma: float) -> float:
    """Generalized SNR: vol^(2/n) / (2 pi sigma^2)."""
    if sigma <= 0:
        raise ValueError("noise level must be positive")
    return float(lat.volume_squared) ** (1.0 / lat.dim) / (TWO_PI * sigma * sigma)


# ---------------------------------------------------------------------------
# The nested 8-dimensional lattice chain


def load_code_tower_asset() -> dict:
    with resources.files("latsec.assets").joinpath("nested_codes_8d.json").open() as fh:
        return json.load(fh)


@dataclass(frozen=True)
class NestedChain8:
    """Nine nested 8-dimensional lattices, consecutive indices all 2,
    running from the half-scaled Gosset lattice down to its double."""

    lattices: tuple[Lattice, ...]
    names: tuple[str, ...]

    @staticmethod
    def build() -> "NestedChain8":
        lat = {k: construction_a(tower_code(k)) for k in range(1, 9)}
        members = [
            lat[4].scaled_pow2(-2, name="E8/sqrt2"),
            lat[3].scaled_pow2(-2, name="L8*"),
            lat[2].scaled_pow2(-2, name="(D4^2)*"),
            lat[1].scaled_pow2(-2, name="D8*"),
            integer_lattice(8),
            construction_a(tower_code(7), name="D8"),
            construction_a(tower_code(6), name="D4^2"),
            construction_a(tower_code(5), name="L8"),
            construction_a(tower_code(4), name="sqrt2E8"),
        ]
        names = tuple(m.name for m in members)
        return NestedChain8(tuple(members), names)

    def indices(self) -> list[int]:
        """Quotient size between consecutive members."""
        out = []
        for a, b in zip(self.lattices, self.lattices[1:]):
            out.append(CosetLabeling(a, b).size)
        return out


# ---------------------------------------------------------------------------
# Multilevel encoding through the code tower


@cache
def _tower_G() -> np.ndarray:
    return np.array(nested_code_tower_matrix(), dtype=np.int64)


@cache
def _tower_G_inv() -> np.ndarray:
    """Inverse of the tower matrix over F2 (c = s G  =>  s = c G^-1)."""
    g = nested_code_tower_matrix()
    cols = []
    for i in range(8):
        unit = tuple(1 if j == i else 0 for j in range(8))
        sol = exact.f2_solve(g, unit)
        assert sol is not None
        cols.append(sol)
    # f2_solve gives coefficients s_i with s_i G = e_i; stacking them as
    # rows gives S with S G = I, i.e. S = G^-1 and s = c @ S
    return np.array(cols, dtype=np.int64)


def _blocks_from_bits(bits: np.ndarray) -> np.ndarray:
    """(batch, l) bit array -> (batch, q+1, 8) zero-padded coefficient blocks."""
    batch, l = bits.shape
    q, r = divmod(l, 8)
    nblocks = q + 1
    padded = np.zeros((batch, nblocks * 8), dtype=np.int64)
    padded[:, :l] = bits
    return padded.reshape(batch, nblocks, 8)


def multilevel_encode_batch(bits: np.ndarray, chain: str = "z8", center: bool = False,
                            reduce_shaping: bool = False) -> np.ndarray:
    """Vectorized multilevel encoder.

    bits: (batch, l) 0/1 array.  Returns integer frame coordinates
    (batch, 8); for the e8 chain the true point is the frame divided by
    sqrt(2).  Each 8-bit block multiplies the tower matrix over F2; the
    lifted 0/1 codewords are combined with weights 2^m.
    """
    bits = np.asarray(bits, dtype=np.int64)
    if bits.ndim != 2 or bits.shape[1] < 1:
        raise ValueError("need a (batch, l) bit array with l >= 1")
    if chain not in ("z8", "e8"):
        raise ValueError("chain must be 'z8' or 'e8'")
    if chain == "e8":
        bits = np.concatenate(
            [np.zeros((bits.shape[0], 4), dtype=np.int64), bits], axis=1
        )
    blocks = _blocks_from_bits(bits)  # (batch, nb, 8)
    cw = (blocks @ _tower_G()) % 2  # F2 codeword per block, lifted to 0/1
    weights = 1 << np.arange(blocks.shape[1], dtype=np.int64)
    x = (cw * weights[None, :, None]).sum(axis=1)
    if reduce_shaping:
        x = _reduce_mod_shaping(x, bits.shape[1])
    if center:
        x = x - _center_offset(bits.shape[1])
    return x


def _shaping_lattice(l: int) -> Lattice:
    """Lattice labeled by the all-zero trailing rows of the last block."""
    q, r = divmod(l, 8)
    if r == 0:
        return integer_lattice(8).scaled_pow2(2 * q)
    return construction_a(tower_code(8 - r)).scaled_pow2(2 * q)


def _reduce_mod_shaping(x: np.ndarray, l: int) -> np.ndarray:
    lam = _shaping_lattice(l)
    out = np.empty_like(x)
    for i, row in enumerate(x):
        t = closest_point(lam, row.astype(float))
        out[i] = row - np.rint(t.ambient).astype(np.int64)
    return out


def _center_offset(l: int):
    """Midpoint of the encoder image box, subtracted to zero the mean."""
    q, r = divmod(l, 8)
    top = (1 << (q + 1)) - 1  # all blocks at coefficient 1 on the all-ones row
    return top / 2.0


def multilevel_encode(bits, chain: str = "z8", center: bool = False,
                      reduce_shaping: bool = False) -> LatticePoint:
    """Single-input multilevel encoder; returns a point of the integer
    lattice (z8 chain) or of the Gosset lattice frame (e8 chain)."""
    arr = np.array([list(map(int, bits))], dtype=np.int64)
    x = multilevel_encode_batch(arr, chain, center=center, reduce_shaping=reduce_shaping)[0]
    frame = integer_lattice(8) if chain == "z8" else gosset_lattice()
    if chain == "e8":
        # frame coords for the Gosset basis: solve x = u B with B the
        # construction basis (true point is x / sqrt 2)
        binv = np.array(
            [[float(v) for v in row] for row in exact.inverse(frame.basis)]
        )
        coords = tuple(int(round(c)) for c in x @ binv)
        return frame.point(coords)
    return frame.point(tuple(int(v) for v in x))


def _level_rows(chain: str, l: int) -> list[list[int]]:
    """Tower-row indices carrying data bits at each level."""
    if chain == "e8":
        l = l + 4
    q, r = divmod(l, 8)
    rows: list[list[int]] = []
    for m in range(q):
        rows.append(list(range(8)))
    if r:
        rows.append(list(range(r)))
    if chain == "e8" and rows:
        rows[0] = [i for i in rows[0] if i >= 4]
    return rows


def multilevel_decode_batch(
    x: np.ndarray, l: int, chain: str = "z8", reduced: bool = False
) -> np.ndarray:
    """Vectorized multistage decoder, inverse of the encoder on clean input.

    At each level the code coset is decoded against the mod-2 Euclidean
    metric (exhaustive over the level's subcode), the codeword is
    subtracted, and the residual is halved.  With reduced=True the last
    partial block is decoded against the full block code, because the
    shaping reduction may have populated its trailing rows.
    """
    if chain not in ("z8", "e8"):
        raise ValueError("chain must be 'z8' or 'e8'")
    y = np.asarray(x, dtype=float)
    if chain == "e8":
        lt = l + 4
    else:
        lt = l
    q, r = divmod(lt, 8)
    nblocks = q + (1 if r else 0)
    G = _tower_G()
    batch = y.shape[0]
    out_bits = np.zeros((batch, nblocks, 8), dtype=np.int64)
    for m in range(nblocks):
        if m == 0 and chain == "e8":
            rows = list(range(4, 8))
        elif m == q and r and not reduced:
            rows = list(range(r))
        else:
            rows = list(range(8))
        if len(rows) == 8:
            # unconstrained level: per-coordinate rounding, then solve for
            # the coefficients through the tower-matrix inverse
            xhat = np.rint(y).astype(np.int64)
            chosen = np.abs(xhat) % 2
            coeffs = (chosen @ _tower_G_inv()) % 2
            out_bits[:, m, :] = coeffs
        else:
            # subcode spanned by the allowed rows, exhaustively decoded
            msgs = np.array(
                [[(t >> i) & 1 for i in range(len(rows))] for t in range(1 << len(rows))],
                dtype=np.int64,
            )
            cw = (msgs @ G[rows, :]) % 2  # (M, 8)
            # distance of y to cw + 2Z^8 per codeword
            z = np.rint((y[:, None, :] - cw[None, :, :]) / 2.0)
            cand = cw[None, :, :] + 2.0 * z
            d2 = ((y[:, None, :] - cand) ** 2).sum(axis=2)
            best = np.argmin(d2, axis=1)
            chosen = cw[best]  # (batch, 8)
            coeffs = msgs[best]  # coefficients on the allowed rows
            for j, row in enumerate(rows):
                out_bits[:, m, row] = coeffs[:, j]
        y = (y - chosen) / 2.0
    flat = out_bits.reshape(batch, -1)
    if chain == "e8":
        return flat[:, 4 : 4 + l]
    return flat[:, :l]


def multilevel_decode(x, l: int, chain: str = "z8") -> tuple[int, ...]:
    arr = np.asarray(x, dtype=float)[None, :]
    if chain == "e8":
        arr = arr * np.sqrt(2.0)  # back to the integer code frame
    bits = multilevel_decode_batch(arr, l, chain)[0]
    return tuple(int(b) for b in bits)


def multilevel_decode_point(y, l: int, chain: str = "z8") -> tuple[int, ...]:
    """Decode from true coordinates (the e8 chain frame is sqrt2-scaled)."""
    return multilevel_decode(y, l, chain)


def coset_labels_per_level(bits, chain: str = "z8") -> list[list[int]]:
    """Per-level coefficient vectors (the block contents after padding)."""
    arr = np.array([list(map(int, bits))], dtype=np.int64)
    if chain == "e8":
        arr = np.concatenate([np.zeros((1, 4), dtype=np.int64), arr], axis=1)
    blocks = _blocks_from_bits(arr)[0]
    return [list(map(int, b)) for b in blocks]
