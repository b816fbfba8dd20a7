"""Figure rendering for the CLI report paths.

Each renderer takes the rows already written to the delimited output and
draws the matching plot next to it.  Rendering is optional (--plot); the
delimited file remains the primary artifact.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def _new_axes(xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(7.0, 4.4))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", linestyle=":", linewidth=0.6)
    return fig, ax


def render_curve(rows: list[dict], title: str, path: str) -> None:
    """Secrecy-function curve over y in dB."""
    fig, ax = _new_axes("y (dB)", "secrecy function")
    ax.plot([r["y_db"] for r in rows], [r["xi"] for r in rows], lw=1.4)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_bound(rows: list[dict], path: str) -> None:
    """Per-dimension gain lower bound with known extremal gains overlaid."""
    fig, ax = _new_axes("dimension n", "secrecy gain")
    ax.semilogy([r["n"] for r in rows], [r["bound_exact"] for r in rows],
                lw=1.4, label="mass-formula bound")
    ax.semilogy([r["n"] for r in rows], [r["bound_asymptotic"] for r in rows],
                lw=1.0, linestyle="--", label="asymptotic form")
    pts = [(r["n"], r["extremal_gain"]) for r in rows if r.get("extremal_gain")]
    if pts:
        ax.semilogy([p[0] for p in pts], [p[1] for p in pts], "o", ms=4,
                    label="extremal lattices")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sweep(rows: list[dict], path: str) -> None:
    """Eavesdropper correct-decision probability versus SNR."""
    fig, ax = _new_axes("Eb/N0 (dB)", "P(correct coset)")
    ax.plot([r["snr_db"] for r in rows], [r["p_eve_mc"] for r in rows],
            "o", ms=3.5, label="Monte Carlo")
    ax.plot([r["snr_db"] for r in rows], [r["p_eve_closed"] for r in rows],
            lw=1.2, label="closed form")
    ax.plot([r["snr_db"] for r in rows], [r["p_eve_4qam"] for r in rows],
            lw=1.2, linestyle="--", label="4-QAM reference")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
