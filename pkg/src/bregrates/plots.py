"""Static SVG figures for profiles and rate sweeps."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import RateRecord
from .rates import DistanceProfile


def plot_profile(profile: DistanceProfile, path) -> None:
    """D(r) and Phi(r) = D(r)/r on log-log axes (positive parts only;
    nodes where D has hit zero are marked on the r-axis)."""
    r = profile.r_grid
    d = profile.d_values
    pos = d > 0
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    if np.any(pos):
        ax.loglog(r[pos], d[pos], "o-", ms=3, lw=1.2, label="D(r)")
        ax.loglog(r[pos], d[pos] / r[pos], "s--", ms=3, lw=1.0, label="Phi(r) = D(r)/r")
    if np.any(~pos):
        floor = d[pos].min() if np.any(pos) else 1.0
        ax.plot(r[~pos], np.full(np.sum(~pos), floor), "kx", ms=4,
                label="D(r) = 0 (benchmark tail)")
    ax.set_xlabel("r")
    ax.set_ylabel("value")
    ax.set_title("distance function profile")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_rates(records: list[RateRecord], path) -> None:
    """Sweep overlay: B_skewed per record, the upper envelope C_ub * phi(delta),
    and the converse floor D(c * Phi^{-1}(delta)), on log-log axes."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    markers = {"randomUnit": "o", "topSingular": "^"}
    for mode in sorted({rec.mode for rec in records}):
        sel = [rec for rec in records if rec.mode == mode]
        ax.loglog([rec.delta for rec in sel],
                  [max(rec.b_skewed, 1e-300) for rec in sel],
                  markers.get(mode, "o"), ms=4, alpha=0.7,
                  label=f"B_skewed ({mode})")
    by_delta = {}
    for rec in records:
        by_delta[rec.delta] = rec
    deltas = np.array(sorted(by_delta))
    upper = np.array([by_delta[d].upper_constant * by_delta[d].phi_delta for d in deltas])
    lower = np.array([by_delta[d].lower_bound for d in deltas])
    ax.loglog(deltas, upper, "-", lw=1.4, label="C_ub * phi(delta)")
    lp = lower > 0
    if np.any(lp):
        ax.loglog(deltas[lp], lower[lp], "--", lw=1.4, label="D(c * Phi^-1(delta))")
    ax.set_xlabel("noise level delta")
    ax.set_ylabel("skewed Bregman distance")
    ax.set_title("two-sided rate bounds")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
