"""Figure rendering for the command-line report path.

Each renderer takes the already-computed report data and writes one PNG
next to the delimited output.  Figures are a convenience view of the
report; the JSON/CSV files remain the authoritative, byte-stable
artifacts.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .hardy import p_hardy
from .postselect import GridSpec, admissible_mask, batch_quantities

DPI = 150
# Scrub version-dependent metadata so identical runs give identical bytes.
_PNG_METADATA = {"Software": None}


def _save(fig, path: Path) -> None:
    fig.savefig(path, dpi=DPI, metadata=_PNG_METADATA, bbox_inches="tight")
    plt.close(fig)


def render_hardy_max(a_star: float, p_max: float, path: Path) -> None:
    """Contradiction probability over the state parameter, peak marked."""
    a = np.linspace(0.0, 1.0, 1001)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(a, [p_hardy(x) for x in a], lw=1.5)
    ax.axvline(a_star, color="tab:red", lw=0.8, ls="--")
    ax.plot([a_star], [p_max], "o", color="tab:red", ms=5)
    ax.annotate(f"({a_star:.6f}, {p_max:.6f})", (a_star, p_max),
                textcoords="offset points", xytext=(8, -12), fontsize=9)
    ax.set_xlabel("state parameter a = cos(theta)")
    ax.set_ylabel("P(contradiction)")
    ax.set_title("Ladder-argument contradiction probability")
    ax.grid(alpha=0.3)
    _save(fig, path)


def render_ledger(ledgers: list, path: Path) -> None:
    """Bar chart of computed ledger values with their targets."""
    entries = [(led["name"], e) for led in ledgers for e in led["entries"]]
    labels = [f"{name}:{e['id']}" for name, e in entries]
    values = [e["value"] if e["value"] is not None else float("nan")
              for _, e in entries]
    colors = ["tab:green" if e["pass"] else "tab:red" for _, e in entries]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.9 * len(entries)), 4.0))
    x = np.arange(len(entries))
    ax.bar(x, values, color=colors, alpha=0.8)
    for i, (_, e) in enumerate(entries):
        if isinstance(e["target"], (int, float)):
            ax.plot([i - 0.4, i + 0.4], [e["target"]] * 2, "k--", lw=1.0)
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("probability")
    ax.set_title("Ledger values (dashed: exact targets)")
    ax.grid(alpha=0.3, axis="y")
    _save(fig, path)


def render_sweep(grid: GridSpec, path: Path, heatmap_steps: int = 256) -> None:
    """Per-slice gap maxima plus a gap heatmap for each theta slice.

    Heatmaps are re-evaluated at reduced resolution; the report retains
    the full-resolution statistics.
    """
    thetas = list(grid.theta_values)
    n = len(thetas)
    fig, axes = plt.subplots(1, max(n, 1), figsize=(4.2 * max(n, 1), 3.6),
                             squeeze=False)
    al = np.linspace(grid.margin, math.pi - grid.margin, heatmap_steps)
    be = np.linspace(grid.margin, math.pi - grid.margin, heatmap_steps)
    a_grid, b_grid = np.meshgrid(al, be, indexing="ij")
    mask = admissible_mask(a_grid, b_grid, max(grid.margin, 1e-4))
    for k, theta in enumerate(thetas):
        ax = axes[0][k]
        q = batch_quantities(theta, a_grid.ravel(), b_grid.ravel())
        gap = q["gap_hardy"].reshape(a_grid.shape)
        gap = np.where(mask, gap, np.nan)
        lim = max(1e-12, float(np.nanmax(np.abs(gap))))
        im = ax.pcolormesh(al, be, gap.T, cmap="RdBu_r", vmin=-lim, vmax=lim,
                           shading="auto")
        ax.set_title(f"theta = {theta:.4f}", fontsize=10)
        ax.set_xlabel("alpha")
        if k == 0:
            ax.set_ylabel("beta")
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.suptitle("Gap P(contradiction) - P(inapplicable), ladder ordering 1")
    _save(fig, path)


def render_distillation(report: dict, path: Path) -> None:
    """Entropy and keep-probability over the amplitude ratio, with the
    configured operating point marked."""
    q = np.linspace(0.0, 1.0, 401)
    keep = (1 + q ** 2) / 2
    lam1 = 1 / (1 + q ** 2)
    lam2 = q ** 2 / (1 + q ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        entropy = -(lam1 * np.log(lam1) + np.where(lam2 > 0, lam2 * np.log(lam2), 0.0))
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(q, entropy, label="partial entropy of kept state", lw=1.5)
    ax.plot(q, keep, label="keep probability", lw=1.5)
    ax.axhline(math.log(2), color="gray", lw=0.8, ls=":", label="ln 2")
    q0 = report["Q"]
    ax.axvline(q0, color="tab:red", lw=0.8, ls="--")
    ax.plot([q0], [report["entropy"]], "o", color="tab:red", ms=5)
    ax.set_xlabel("amplitude ratio Q = tau1 * tau2")
    ax.set_ylabel("value")
    ax.set_title("Post-selected distillation")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    _save(fig, path)


def render_povm(alpha: float, beta: float, path: Path) -> None:
    """Discrimination outcome probabilities against the basis overlap."""
    u = np.linspace(0.0, 0.999, 400)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(u, 1 - u, label="success on either input", lw=1.5)
    ax.plot(u, u, label="inconclusive on either input", lw=1.5)
    s0 = abs(math.sin(alpha - beta))
    ax.axvline(s0, color="tab:red", lw=0.8, ls="--",
               label=f"configured overlap {s0:.4f}")
    ax.set_xlabel("overlap |<minus|plus>|")
    ax.set_ylabel("probability")
    ax.set_title("Unambiguous discrimination statistics")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    _save(fig, path)
