"""Command-line frontend.

Subcommands: gain, curve, extremal, bound, encode, decode, simulate,
catalog.  Output is CSV or JSON (17 significant digits for floats, so
files round-trip); --plot additionally renders a PNG next to the
delimited output.  Runs are deterministic for fixed argv and seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import channel, coding, figures, theta
from .lattices import (
    catalog,
    catalog_lookup,
    lattice_to_json,
    min_norm_and_kissing,
    tower_code,
)
from .qexpansions import extremal_theta, polynomial_pretty, weak_secrecy_gain_exact

SCHEMA_VERSION = 1


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _write_rows(rows: list[dict], columns: list[str], args) -> None:
    if args.format == "json":
        payload = {"schema_version": SCHEMA_VERSION, "rows": rows}
        text = json.dumps(payload, default=_fmt, indent=2) + "\n"
    else:
        lines = [",".join(columns)]
        for r in rows:
            lines.append(",".join(_fmt(r[c]) for c in columns))
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_json(obj: dict, args) -> None:
    obj = {"schema_version": SCHEMA_VERSION, **obj}
    text = json.dumps(obj, default=_fmt, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _plot_path(args) -> str:
    if not args.out:
        raise ValueError("--plot requires --out to name the figure file")
    stem = args.out.rsplit(".", 1)[0]
    return stem + ".png"


def _parse_range(spec: str, steps_default: int = 81) -> tuple[float, float, int]:
    parts = spec.split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"range must be lo:hi[:steps], got {spec!r}")
    lo, hi = float(parts[0]), float(parts[1])
    steps = int(parts[2]) if len(parts) == 3 else steps_default
    if steps < 2 or hi <= lo:
        raise ValueError(f"bad range {spec!r}")
    return lo, hi, steps


# ---------------------------------------------------------------------------
# Target resolution: a named lattice or an even-unimodular dimension


class Target:
    def __init__(self, name: str, n: int, vol, evaluator, weak, y0):
        self.name = name
        self.n = n
        self.vol = vol
        self.evaluator = evaluator
        self.weak = weak  # Fraction | float | None
        self.y0 = y0  # symmetry point, None when unknown


def _resolve_target(spec: str) -> Target:
    spec = spec.strip()
    if spec.isdigit():
        n = int(spec)
        poly = extremal_theta(n)
        return Target(
            f"extremal-{n}", n, 1.0, theta.evaluator_polynomial(poly),
            weak_secrecy_gain_exact(poly), 1.0,
        )
    key = spec.upper().replace("LAMBDA", "L")
    if key in ("L24", "LEECH"):
        return Target(
            "Lambda24", 24, 1.0, theta.evaluator_closed_form("L24"),
            weak_secrecy_gain_exact(24), 1.0,
        )
    if key == "E8":
        return Target(
            "E8", 8, 1.0, theta.evaluator_closed_form("E8"),
            weak_secrecy_gain_exact(8), 1.0,
        )
    if key.startswith("Z") and key[1:].isdigit():
        n = int(key[1:])
        return Target(key, n, 1.0, theta.evaluator_closed_form(key), Fraction(1), 1.0)
    if key.startswith("D") and key[1:].isdigit():
        n = int(key[1:])
        ev = theta.evaluator_closed_form(key)
        weak, y0 = _weak_if_symmetric(ev, n, 2.0)
        return Target(key, n, 2.0, ev, weak, y0)
    lat = catalog_lookup(spec)  # raises KeyError for unknown names
    vol = float(lat.volume)
    ev = theta.evaluator_for_lattice(lat)
    weak, y0 = _weak_if_symmetric(ev, lat.dim, vol)
    return Target(lat.name or spec, lat.dim, vol, ev, weak, y0)


def _weak_if_symmetric(ev, n: int, vol: float):
    try:
        return theta.weak_secrecy_gain_numeric(ev, n, vol)
    except theta.SymmetryPointUnknownError:
        return None, None


# ---------------------------------------------------------------------------
# Subcommands


def cmd_gain(args) -> int:
    t = _resolve_target(args.target)
    sg = theta.strong_secrecy_gain(t.evaluator, t.n, t.vol)
    result = theta.SecrecyGain.assemble(t.name, t.weak, sg.chi, t.y0)
    if args.format == "json":
        _write_json(
            {
                "lattice": t.name,
                "weak": None if t.weak is None else _fmt(t.weak),
                "strong": sg.chi,
                "y_star": sg.y_star,
                "y_symmetry": t.y0,
                "conjecture_gap": result.conjecture_gap,
                "search_flagged": sg.flagged,
            },
            args,
        )
        return 0
    lines = []
    if t.weak is not None:
        lines.append(_fmt(t.weak))
    else:
        lines.append("weak: n/a (no known symmetry point)")
    lines.append(f"strong {_fmt(sg.chi)} at y* = {_fmt(sg.y_star)}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_curve(args) -> int:
    if args.plot and not args.out:
        raise ValueError("--plot requires --out to name the figure file")
    t = _resolve_target(args.target)
    lo, hi, steps = _parse_range(args.y_range)
    lam2 = float(t.vol) ** (2.0 / t.n)
    rows = []
    for i in range(steps):
        ydb = lo + (hi - lo) * i / (steps - 1)
        y = 10.0 ** (ydb / 10.0)
        th_lat = t.evaluator(y)
        th_cubic = theta.jacobi_theta(3, math.exp(-math.pi * lam2 * y)) ** t.n
        rows.append(
            {
                "y_db": ydb,
                "xi": th_cubic / th_lat,
                "theta_lattice": th_lat,
                "theta_cubic": th_cubic,
            }
        )
    _write_rows(rows, ["y_db", "xi", "theta_lattice", "theta_cubic"], args)
    if args.plot:
        figures.render_curve(rows, f"secrecy function of {t.name}", _plot_path(args))
    return 0


def cmd_extremal(args) -> int:
    poly = extremal_theta(args.n)
    norm, count = poly.min_norm_and_count()
    if args.format == "json":
        _write_json(
            {
                "polynomial": poly.to_json(),
                "pretty": polynomial_pretty(poly),
                "min_norm": norm,
                "kissing_coefficient": int(count),
                "weak_gain": _fmt(poly.weak_secrecy_gain()),
            },
            args,
        )
        return 0
    text = (
        f"{polynomial_pretty(poly)}\n"
        f"min norm {norm}, coefficient {int(count)}\n"
        f"weak gain {poly.weak_secrecy_gain()}\n"
    )
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_bound(args) -> int:
    if args.plot and not args.out:
        raise ValueError("--plot requires --out to name the figure file")
    lo, hi, step = (int(x) for x in args.n_range.split(":"))
    rows = []
    for n in range(lo, hi + 1, step):
        if n % 8:
            continue
        row = {
            "n": n,
            "bound_exact": theta.secrecy_gain_lower_bound(n),
            "bound_asymptotic": theta.secrecy_gain_asymptotic(n),
            "extremal_gain": float(weak_secrecy_gain_exact(n)),
        }
        rows.append(row)
    _write_rows(rows, ["n", "bound_exact", "bound_asymptotic", "extremal_gain"], args)
    if args.plot:
        figures.render_bound(rows, _plot_path(args))
    return 0


def _parse_bits(args) -> list[int]:
    hx = args.bits.strip().lower().removeprefix("0x")
    nbits = args.nbits if args.nbits else 4 * len(hx)
    if nbits > 4 * len(hx):
        raise ValueError("--nbits exceeds the bits provided")
    value = int(hx, 16)
    total = 4 * len(hx)
    bits = [(value >> (total - 1 - i)) & 1 for i in range(total)]
    return bits[:nbits]


def cmd_encode(args) -> int:
    bits = _parse_bits(args)
    point = coding.multilevel_encode(bits, args.chain)
    labels = coding.coset_labels_per_level(bits, args.chain)
    frame_scale2 = -1 if args.chain == "e8" else 0
    frame = np.rint(point.ambient * 2.0 ** (-frame_scale2 / 2.0)).astype(int)
    _write_json(
        {
            "chain": args.chain,
            "nbits": len(bits),
            "point": [int(v) for v in frame],
            "frame_scale2": frame_scale2,
            "coset_labels_per_level": labels,
        },
        args,
    )
    return 0


def cmd_decode(args) -> int:
    vec = [float(x) for x in args.point.split(",")]
    if len(vec) != 8:
        raise ValueError("point must have 8 coordinates")
    frame_scale2 = -1 if args.chain == "e8" else 0
    true = np.array(vec) * 2.0 ** (frame_scale2 / 2.0)
    bits = coding.multilevel_decode(true, args.nbits, args.chain)
    value = 0
    for b in bits:
        value = (value << 1) | b
    pad = (4 - len(bits) % 4) % 4
    hexstr = format(value << pad, f"0{math.ceil(len(bits)/4)}x") if bits else ""
    _write_json(
        {"chain": args.chain, "nbits": len(bits), "bits": "".join(map(str, bits)),
         "hex": hexstr},
        args,
    )
    return 0


def cmd_simulate(args) -> int:
    if args.plot and not args.out:
        raise ValueError("--plot requires --out to name the figure file")
    if args.sweep_ebn0:
        lo, hi, steps = _parse_range(args.sweep_ebn0, steps_default=15)
        rows = []
        for i in range(steps):
            snr_db = lo + (hi - lo) * i / (steps - 1)
            g = 10.0 ** (snr_db / 10.0)
            mc = channel.simulate_coset_z2_example(g, args.trials, args.seed + i)
            a2 = 3.0 * g / 35.0  # squared spacing of the quotient constellation
            bound = (a2 / (2 * math.pi)) * theta.jacobi_theta(3, math.exp(-2.0 * a2)) ** 2
            rows.append(
                {
                    "snr_db": snr_db,
                    "p_eve_mc": mc.p_correct,
                    "p_eve_closed": channel.pce_coset_z2(g),
                    "p_eve_bound": bound,
                    "p_eve_4qam": channel.pce_4qam(g),
                }
            )
        _write_rows(rows, ["snr_db", "p_eve_mc", "p_eve_closed", "p_eve_bound"], args)
        if args.plot:
            figures.render_sweep(rows, _plot_path(args))
        return 0

    fine = catalog_lookup(args.fine)
    coarse = fine.scaled_pow2(2 * args.coarse_pow2)
    code = coding.build_coset_code(fine, coarse)
    params = channel.ChannelParams(
        sigma_b=args.sigma_b, sigma_e=args.sigma_e, seed=args.seed, trials=args.trials
    )
    bob, eve = channel.simulate_wiretap(code, params)
    _write_json(
        {
            "config": {
                "fine": args.fine,
                "coarse": f"2^{args.coarse_pow2} * {args.fine}",
                "sigma_b": args.sigma_b,
                "sigma_e": args.sigma_e,
                "box": 4,
            },
            "p_bob": bob.p_correct,
            "p_eve": eve.p_correct,
            "stderr_bob": bob.stderr,
            "stderr_eve": eve.stderr,
            "theta_bound_eve": eve.bound,
            "trials": params.trials,
            "seed": params.seed,
        },
        args,
    )
    return 0


def cmd_catalog(args) -> int:
    rows = []
    for name, lat in catalog().items():
        mn, kiss = min_norm_and_kissing(lat)
        rows.append(
            {
                "name": name,
                "dim": lat.dim,
                "volume": _fmt(lat.volume),
                "min_norm": _fmt(mn),
                "kissing": kiss,
                "scale2": lat.scale2,
            }
        )
    if args.format == "json":
        codes = [tower_code(k).to_json() for k in range(1, 9)]
        chain = coding.NestedChain8.build()
        _write_json(
            {
                "lattices": rows,
                "nested_codes": codes,
                "chain": [
                    {**lattice_to_json(lat), "name": nm}
                    for nm, lat in zip(chain.names, chain.lattices)
                ],
            },
            args,
        )
        return 0
    _write_rows(rows, ["name", "dim", "volume", "min_norm", "kissing", "scale2"], args)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="latsec",
        description="Lattice coset coding and secrecy-gain analysis for the "
        "Gaussian wiretap channel.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("gain", help="weak and strong secrecy gain of a lattice or dimension")
    sp.add_argument("target", help="lattice name (E8, Z8, D4, L24, L8) or a multiple of 8")
    common(sp)
    sp.set_defaults(func=cmd_gain)

    sp = sub.add_parser(
        "curve",
        help="secrecy-function curve",
        description="Emit the secrecy-function curve of a lattice. "
        "CSV columns: y_db, xi, theta_lattice, theta_cubic.",
    )
    sp.add_argument("target")
    sp.add_argument("--y-range", default="-10:10:81", help="dB range lo:hi[:steps]")
    sp.add_argument("--plot", action="store_true", help="render a PNG next to --out")
    common(sp)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("extremal", help="extremal theta polynomial for a dimension")
    sp.add_argument("n", type=int)
    common(sp)
    sp.set_defaults(func=cmd_extremal)

    sp = sub.add_parser(
        "bound",
        help="per-dimension secrecy-gain lower bound table",
        description="Tabulate the best-gain lower bound per dimension. "
        "CSV columns: n, bound_exact, bound_asymptotic, extremal_gain.",
    )
    sp.add_argument("--n-range", default="8:160:8", help="lo:hi:step dimensions")
    sp.add_argument("--plot", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("encode", help="multilevel encoder over the nested 8-dim chain")
    sp.add_argument("--chain", choices=("z8", "e8"), required=True)
    sp.add_argument("--bits", required=True, help="data bits as a hex string")
    sp.add_argument("--nbits", type=int, default=0, help="bit count (default: all)")
    common(sp)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="multistage decoder, inverse of encode")
    sp.add_argument("--chain", choices=("z8", "e8"), required=True)
    sp.add_argument("--point", required=True, help="8 comma-separated frame coordinates")
    sp.add_argument("--nbits", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser(
        "simulate",
        help="Monte Carlo wiretap simulation",
        description="Estimate correct-decision probabilities over the AWGN "
        "wiretap channel. Sweep CSV columns: snr_db, p_eve_mc, "
        "p_eve_closed, p_eve_bound. Single-config output is JSON.",
    )
    sp.add_argument("--fine", default="Z2", help="fine lattice name")
    sp.add_argument("--coarse-pow2", type=int, default=1,
                    help="coarse = 2^m * fine (default m=1)")
    sp.add_argument("--sigma-b", type=float, default=0.1)
    sp.add_argument("--sigma-e", type=float, default=0.5)
    sp.add_argument("--trials", type=int, default=100000)
    sp.add_argument("--sweep-ebn0", help="dB range lo:hi[:steps]; runs the "
                    "two-dimensional quotient example sweep instead")
    sp.add_argument("--plot", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser(
        "catalog",
        help="list built-in lattices and codes",
        description="List built-in lattices (CSV columns: name, dim, volume, "
        "min_norm, kissing, scale2); JSON adds the nested code tower and chain.",
    )
    common(sp)
    sp.set_defaults(func=cmd_catalog)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, ArithmeticError) as exc:
        err = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        sys.stdout.write(json.dumps(err) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
