"""AWGN wiretap channel: closed-form eavesdropper statistics for the
two-dimensional quotient example, Monte Carlo estimation of the coset
correct-decision probabilities, and the theta-series upper bound they are
validated against.

Reproducibility: every simulation derives one counter-based generator per
purpose (messages, dither, per-receiver noise) from the user seed, and
consumes a fixed number of draws per trial, so a (seed, trials) pair maps
to bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coding import CosetCode
from .lattices import _decode_construction_a, _diagonal_scale
from .theta import evaluator_for_lattice

TWO_PI = 2.0 * math.pi

_STREAMS = {"message": 0x6d73, "dither": 0x6472, "bob": 0x626f, "eve": 0x6576}


def _stream(seed: int, purpose: str) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(_STREAMS[purpose],))
    return np.random.Generator(np.random.Philox(ss))


def _normals(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normals via Box-Muller: a rejection-free transform, so the
    generator consumes exactly two uniforms per pair of samples."""
    n = int(np.prod(shape))
    m = (n + 1) // 2
    u1 = rng.random(m)
    u2 = rng.random(m)
    r = np.sqrt(-2.0 * np.log1p(-u1))
    ang = 2.0 * np.pi * u2
    z = np.concatenate([r * np.cos(ang), r * np.sin(ang)])[:n]
    return z.reshape(shape)


def q_function(x: float) -> float:
    """Gaussian tail probability P(N(0,1) > x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def pce_4qam(ebn0: float) -> float:
    """Eavesdropper symbol correct-decision probability for plain 4-QAM,
    in the standard high-SNR form 1 - 2Q(sqrt(2 Eb/N0))."""
    if ebn0 <= 0:
        raise ValueError("Eb/N0 must be positive")
    return 1.0 - 2.0 * q_function(math.sqrt(2.0 * ebn0))


def pce_coset_z2(ebn0: float) -> float:
    """Eavesdropper coset correct-decision probability for the integer
    quotient scheme in two dimensions (six-point constellation per
    dimension, maximum-likelihood detection, parity decides the coset)."""
    if ebn0 <= 0:
        raise ValueError("Eb/N0 must be positive")
    t = math.sqrt(6.0 * ebn0 / 35.0)
    s = (
        5.0 * q_function(t)
        - 4.0 * q_function(3.0 * t)
        + 3.0 * q_function(5.0 * t)
        - 2.0 * q_function(7.0 * t)
        + q_function(9.0 * t)
    )
    return (1.0 - s / 3.0) ** 2


def pce_crossovers(lo_db: float, hi_db: float, step_db: float = 0.05) -> list[tuple[float, float]]:
    """Brackets (a, b) in dB where pce_coset_z2 - pce_4qam changes sign."""
    out = []
    xs = np.arange(lo_db, hi_db + step_db / 2, step_db)
    prev = None
    for x in xs:
        g = 10.0 ** (x / 10.0)
        d = pce_coset_z2(g) - pce_4qam(g)
        if prev is not None and d * prev[1] < 0:
            out.append((prev[0], float(x)))
        prev = (float(x), d)
    return out


# ---------------------------------------------------------------------------
# Monte Carlo simulation


@dataclass(frozen=True)
class ChannelParams:
    sigma_b: float
    sigma_e: float
    seed: int
    trials: int

    def __post_init__(self):
        if self.sigma_b <= 0 or self.sigma_e <= 0:
            raise ValueError("noise levels must be positive")
        if self.trials < 1:
            raise ValueError("need at least one trial")


@dataclass(frozen=True)
class SimResult:
    p_correct: float
    stderr: float
    trials: int
    bound: float | None = None


class BoundViolation(AssertionError):
    """Monte Carlo estimate exceeded the theta-series bound by > 3 sigma."""


def _decode_labels(code: CosetCode, ys: np.ndarray) -> np.ndarray:
    """Vectorized fine-lattice decode + coset label for a (batch, n) array."""
    lat = code.fine
    diag = _diagonal_scale(lat)
    if diag is not None:
        step = float(diag) * 2.0 ** (lat.scale2 / 2.0)
        coords = np.ceil(ys / step - 0.5).astype(np.int64)
    elif lat.ca_code is not None:
        coords = _decode_construction_a(lat, ys)
    else:
        from .lattices import closest_point

        coords = np.array(
            [closest_point(lat, y).coords for y in ys], dtype=np.int64
        )
    return code.labeling.label_coords_batch(coords)


def eve_correct_bound(code: CosetCode, sigma_e: float) -> float:
    """Theta-series upper bound on the coset correct-decision probability:
    vol(fine) (2 pi sigma^2)^(-n/2) Theta_coarse(1/(2 pi sigma^2))."""
    n = code.dim
    y = 1.0 / (TWO_PI * sigma_e * sigma_e)
    theta = evaluator_for_lattice(code.coarse)(y)
    return float(code.fine.volume) * (TWO_PI * sigma_e**2) ** (-n / 2) * theta


def simulate_wiretap(
    code: CosetCode,
    params: ChannelParams,
    box: int = 4,
    validate: bool = False,
) -> tuple[SimResult, SimResult]:
    """Coset transmission over the two AWGN channels.

    Per trial: draw a message label and a dither point of the coarse
    lattice (coordinates uniform in [-box, box]), add per-receiver white
    Gaussian noise, decode the nearest fine-lattice point, and tally
    whether its coset matches.  Returns (bob, eve) estimates; Eve's result
    carries the theta-series bound for her noise level.
    """
    n = code.dim
    trials = params.trials
    msg_rng = _stream(params.seed, "message")
    dit_rng = _stream(params.seed, "dither")
    bob_rng = _stream(params.seed, "bob")
    eve_rng = _stream(params.seed, "eve")

    reps = np.array([r.ambient for r in code.representatives])
    coarse_basis = code.coarse.basis_true

    correct_b = 0
    correct_e = 0
    chunk = 1 << 15
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        labels = msg_rng.integers(0, code.labeling.size, size=b)
        r = dit_rng.integers(-box, box + 1, size=(b, n)).astype(float)
        x = reps[labels] + r @ coarse_basis
        zb = x + params.sigma_b * _normals(bob_rng, (b, n))
        ze = x + params.sigma_e * _normals(eve_rng, (b, n))
        correct_b += int((_decode_labels(code, zb) == labels).sum())
        correct_e += int((_decode_labels(code, ze) == labels).sum())
        done += b

    def result(correct: int, bound: float | None) -> SimResult:
        p = correct / trials
        return SimResult(p, math.sqrt(p * (1.0 - p) / trials), trials, bound)

    bound_e = eve_correct_bound(code, params.sigma_e)
    bob = result(correct_b, None)
    eve = result(correct_e, bound_e)
    if validate and bound_e <= 1.0 and eve.p_correct > bound_e + 3.0 * eve.stderr:
        raise BoundViolation(
            f"estimate {eve.p_correct:.6f} above bound {bound_e:.6f} + 3 sigma"
        )
    return bob, eve


def simulate_coset_z2_example(
    ebn0: float, trials: int, seed: int
) -> SimResult:
    """Monte Carlo twin of pce_coset_z2: six-point-per-dimension finite
    constellation, per-dimension maximum likelihood, coset = parity, with
    Eb the average energy per data bit (one per dimension) and unit noise
    spectral density (variance 1/2 per dimension)."""
    if ebn0 <= 0:
        raise ValueError("Eb/N0 must be positive")
    a = math.sqrt(3.0 * ebn0 / 35.0)  # per-dim energy (35/3) a^2 = Eb
    s = math.sqrt(0.5)
    msg_rng = _stream(seed, "message")
    eve_rng = _stream(seed, "eve")
    correct = 0
    chunk = 1 << 17
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        idx = msg_rng.integers(0, 6, size=(b, 2))
        pts = (2.0 * idx - 5.0) * a
        z = pts + s * _normals(eve_rng, (b, 2))
        jhat = np.clip(np.rint((z / a + 5.0) / 2.0), 0, 5).astype(np.int64)
        ok = ((jhat % 2) == (idx % 2)).all(axis=1)
        correct += int(ok.sum())
        done += b
    p = correct / trials
    return SimResult(p, math.sqrt(p * (1.0 - p) / trials), trials, None)


def bound_ratio(theta_a, theta_b, sigma_e: float) -> float:
    """Ratio of the two theta factors in the correct-decision bound at the
    noise level sigma_e; at sigma^2 = 1/(2 pi) this is the gain of b over a."""
    if sigma_e <= 0:
        raise ValueError("noise level must be positive")
    y = 1.0 / (TWO_PI * sigma_e * sigma_e)
    return theta_a(y) / theta_b(y)
