"""Report figures rendered alongside CSV output.

Figures are a convenience layer on top of the canonical CSV artifacts:
each renderer takes the same row dicts the CSV writer gets and saves a
PNG next to the delimited file.  Headless Agg backend throughout.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_figure"]


def _fig_path(csv_path: str) -> str:
    return (csv_path[:-4] if csv_path.endswith(".csv") else csv_path) + ".png"


def render_figure(subcommand: str, rows: list[dict], csv_path: str) -> str | None:
    """Render the figure matching a subcommand's CSV; returns the path."""
    if not rows or csv_path in (None, "-"):
        return None
    fn = _RENDERERS.get(subcommand)
    if fn is None:
        return None
    fig = fn(rows)
    if fig is None:
        return None
    out = _fig_path(csv_path)
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return out


def _plot_dirichlet(rows):
    xs = sorted({r["x"] for r in rows})
    ys = sorted({r["y"] for r in rows})
    if len(xs) < 2 or len(ys) < 2:
        return None
    grid = np.full((len(xs), len(ys)), np.nan)
    xi = {x: i for i, x in enumerate(xs)}
    yi = {y: i for i, y in enumerate(ys)}
    for r in rows:
        grid[xi[r["x"]], yi[r["y"]]] = r["spectral"]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    im = ax.imshow(grid.T, origin="lower", aspect="auto", cmap="viridis",
                   extent=(min(xs), max(xs), min(ys), max(ys)))
    fig.colorbar(im, ax=ax, label="harmonic value")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("Dirichlet solution")
    return fig


def _plot_lclt(rows):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for n in sorted({r["n"] for r in rows}):
        pts = [(r["k"], r["rel_error"]) for r in rows if r["n"] == n]
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"n={n}")
    ax.set_xlabel("k")
    ax.set_ylabel("relative error")
    ax.set_yscale("log")
    ax.set_title("Local limit approximation error")
    ax.legend()
    return fig


def _plot_tails(rows):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for n in sorted({r["n"] for r in rows}):
        pts = sorted((r["r"], r["ratio"]) for r in rows if r["n"] == n)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"n={n}")
    ax.set_xlabel("r")
    ax.set_ylabel("tail / bound shape")
    ax.set_title("Walk tail against Gaussian-type bound")
    ax.legend(fontsize=8)
    return fig


def _plot_beurling(rows):
    pos = [(r["ratio"], r["prob"]) for r in rows if r["prob"] > 0]
    if len(pos) < 2:
        return None
    pos.sort()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog([p[0] for p in pos], [p[1] for p in pos], marker="o")
    ax.set_xlabel("|x| / R")
    ax.set_ylabel("escape probability")
    ax.set_title("Escape probability power law")
    return fig


def _plot_coupling(rows):
    ns = sorted({r["n"] for r in rows})
    meds = [float(np.median([r["sup_distance"] for r in rows if r["n"] == n])) for n in ns]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(ns, meds, marker="o", label="median sup distance")
    ax.loglog(ns, [n**0.25 for n in ns], "--", label=r"$n^{1/4}$")
    ax.set_xlabel("n")
    ax.set_ylabel("sup distance")
    ax.set_title("Coupling error scaling")
    ax.legend()
    return fig


def _plot_decompose(rows):
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    ax.plot([r["x"] for r in rows], [r["y"] for r in rows], lw=0.7)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    ax.set_title("Planar walk")
    return fig


def _plot_check(rows):
    if not rows or "parameter" not in rows[0]:
        return None
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot([r["parameter"] for r in rows], [r["lhs"] for r in rows],
            marker="o", label="measured")
    ax.plot([r["parameter"] for r in rows], [r["rhs"] for r in rows],
            marker="x", ls="--", label="bound / reference")
    ax.set_xlabel("parameter")
    ax.set_ylabel("value")
    ax.set_title("Bound check")
    ax.legend()
    return fig


_RENDERERS = {
    "dirichlet": _plot_dirichlet,
    "lclt": _plot_lclt,
    "tails": _plot_tails,
    "beurling": _plot_beurling,
    "coupling": _plot_coupling,
    "decompose": _plot_decompose,
    "check": _plot_check,
}
