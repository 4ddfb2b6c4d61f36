"""Matplotlib figures for the CLI report directory (PNG, Agg backend)."""

from __future__ import annotations

import warnings

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .uav import Scenario

_PNG_META = {"Software": None}


def convergence_figure(records_by_algo: dict, title: str, out) -> None:
    """Median best-so-far against evaluations, one line per algorithm.

    Runs of one algorithm are put on a common grid (the evaluation counts of
    its first run) before taking the median; non-finite values are skipped.
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for algo, records in records_by_algo.items():
        grid = np.asarray(records[0].evaluation_trace, dtype=float)
        if grid.size == 0:
            continue
        curves = []
        for rec in records:
            xs = np.asarray(rec.evaluation_trace, dtype=float)
            idx = np.clip(np.searchsorted(xs, grid, side="right") - 1, 0, len(xs) - 1)
            curves.append(np.asarray(rec.best_trace, dtype=float)[idx])
        curves = np.array(curves)
        curves[~np.isfinite(curves)] = np.nan
        if np.all(np.isnan(curves)):
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            med = np.nanmedian(curves, axis=0)
        ax.plot(grid, med, label=algo)
    ax.set_xlabel("function evaluations")
    ax.set_ylabel("best objective (median over runs)")
    if ax.lines and all(np.nanmin(l.get_ydata()) > 0 for l in ax.lines):
        ax.set_yscale("log")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if ax.lines:
        ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=110, metadata=_PNG_META)
    plt.close(fig)


def uav_figure(scenario: Scenario, paths: dict, out) -> None:
    """Top view over terrain contours and an along-track altitude profile."""
    fig, (top, side) = plt.subplots(1, 2, figsize=(11, 4.8), gridspec_kw={"width_ratios": [1, 1.3]})
    x0, x1, y0, y1 = scenario.terrain.extent
    h = scenario.terrain.heights
    xs = np.linspace(x0, x1, h.shape[1])
    ys = np.linspace(y0, y1, h.shape[0])
    cs = top.contourf(xs, ys, h, levels=12, cmap="Greens", alpha=0.6)
    fig.colorbar(cs, ax=top, label="ground height")
    for o in scenario.obstacles:
        top.add_patch(plt.Circle((o.x, o.y), o.radius + scenario.safety_width, fill=False, ls="--", color="tab:orange"))
        top.add_patch(plt.Circle((o.x, o.y), o.radius, color="tab:red", alpha=0.6))
    for name, pts in paths.items():
        pts = np.asarray(pts)
        top.plot(pts[:, 0], pts[:, 1], lw=1.6, label=name)
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        dist = np.concatenate([[0.0], np.cumsum(seg)])
        ground, _ = scenario.terrain.height_at(pts[:, 0], pts[:, 1])
        side.plot(dist, pts[:, 2], lw=1.6, label=f"{name} altitude")
        side.fill_between(dist, np.nan_to_num(ground), color="tab:brown", alpha=0.25)
        side.plot(dist, ground + scenario.h_min, color="grey", lw=0.8, ls=":")
        side.plot(dist, ground + scenario.h_max, color="grey", lw=0.8, ls=":")
    top.plot(*scenario.start[:2], "ks")
    top.plot(*scenario.goal[:2], "k^")
    top.set_aspect("equal")
    top.set_xlim(x0, x1)
    top.set_ylim(y0, y1)
    top.set_title(f"{scenario.name}: top view")
    side.set_xlabel("distance along path")
    side.set_ylabel("altitude")
    side.set_title("profile (dotted: height band)")
    if paths:
        top.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=110, metadata=_PNG_META)
    plt.close(fig)
