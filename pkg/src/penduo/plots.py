"""Figure rendering for the experiment reports.

Every CLI case that writes CSV artifacts also renders the matching
matplotlib figures next to them: solution profiles, interface stress and
multiplier time series, and log-log rate fits.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_profiles(x, curves: dict, path, title="", ylabel="u"):
    """Plot one or more nodal profiles over x."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, u in curves.items():
        ax.plot(x, u, lw=1.2, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(curves) > 1:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def save_series(t, series: dict, path, title="", ylabel=""):
    """Plot time series (stress, multipliers, residuals) against t."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, y in series.items():
        ax.plot(t, y, lw=1.2, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def save_rate_plot(rows, slopes: dict, path, title=""):
    """Log-log error curves over the eps sweep with fitted slopes."""
    eps = np.array([row["eps"] for row in rows])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for key, slope in slopes.items():
        err = np.array([row[key] for row in rows])
        if np.all(err > 0.0):
            ax.loglog(eps, err, "o-", lw=1.2, ms=4,
                      label=f"{key} (slope {slope:.2f})")
    ax.set_xlabel("eps")
    ax.set_ylabel("error")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def save_waterfall(x, snapshots, path, title="", max_curves=12):
    """A few solution snapshots of a transient run on one axis."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    stride = max(1, len(snapshots) // max_curves)
    picked = snapshots[::stride]
    if snapshots[-1] not in picked:
        picked.append(snapshots[-1])
    for t, u in picked:
        ax.plot(x, u, lw=1.0, label=f"t={t:.3g}")
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=7, ncol=2)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
