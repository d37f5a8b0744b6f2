"""Figure renderers.

All functions write the figure to the given path and return a small dict of
what was drawn (for tests and logging).  Rendering is deterministic: the
network layout uses a fixed-seed force-directed embedding, and SVG output
drops the volatile date metadata.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schema import SchemaError

plt.rcParams["svg.hashsalt"] = "cdsim-plots"

ACTION_COLORS = {1: "#2bb3c0", -1: "#d62728"}  # adopters cyan, status quo red
_LAYOUT_SEED = 20240


def _save(fig, out_path: str):
    out_path = str(out_path)
    if out_path.endswith(".svg"):
        fig.savefig(out_path, metadata={"Date": None})
    else:
        fig.savefig(out_path, dpi=150)
    plt.close(fig)


def plot_envelope(data: dict, out_path: str, title: str | None = None) -> dict:
    """Adopter-fraction envelope: 95% quantile band plus median and mean."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    t = data["t"]
    ax.fill_between(t, data["q025"], data["q975"], alpha=0.3, color="#2bb3c0",
                    linewidth=0, label="95% envelope")
    ax.plot(t, data["q500"], color="#1f6f78", label="median")
    ax.plot(t, data["mean_zeta"], color="#444444", linestyle="--", linewidth=0.9,
            label="mean")
    ax.set_xlabel("time step")
    ax.set_ylabel("adopter fraction")
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    _save(fig, out_path)
    return {"steps": len(t), "band_width_max": float(np.max(data["q975"] - data["q025"]))}


_AXIS_LABELS = {"alpha": "relative advantage", "u_t": "trend sensitivity",
                "u_v": "visibility boost"}


def _varying_axes(data: dict) -> list[str]:
    return [c for c in ("alpha", "u_t", "u_v") if np.unique(data[c]).size > 1]


def _pivot(data: dict, x_col: str, y_col: str):
    xs = np.unique(data[x_col])
    ys = np.unique(data[y_col])
    grid = np.full((ys.size, xs.size), np.nan)
    for xv, yv, zv in zip(data[x_col], data[y_col], data["zeta_star"]):
        grid[np.searchsorted(ys, yv), np.searchsorted(xs, xv)] = zv
    return xs, ys, grid


def plot_threshold_heatmap(data: dict, out_path: str) -> dict:
    """Adoption-threshold heatmap over the two varying sweep parameters."""
    varying = _varying_axes(data)
    if len(varying) != 2:
        raise SchemaError(
            f"heatmap needs exactly two varying parameters, found {varying or 'none'}; "
            "use threshold-curve for one-dimensional sweeps"
        )
    x_col, y_col = varying
    xs, ys, grid = _pivot(data, x_col, y_col)
    fig, ax = plt.subplots(figsize=(5, 4))
    mesh = ax.pcolormesh(xs, ys, grid, shading="nearest", cmap="viridis",
                         vmin=0.0, vmax=1.0)
    fig.colorbar(mesh, ax=ax, label="adoption threshold")
    ax.set_xlabel(_AXIS_LABELS[x_col])
    ax.set_ylabel(_AXIS_LABELS[y_col])
    fig.tight_layout()
    _save(fig, out_path)
    return {"x": x_col, "y": y_col, "cells": int(np.isfinite(grid).sum())}


def plot_threshold_curve(data: dict, out_path: str) -> dict:
    """Threshold as a curve over one parameter, one line per value of the
    other varying parameter (if any)."""
    varying = _varying_axes(data)
    if not varying:
        raise SchemaError("threshold-curve needs at least one varying parameter")
    x_col = varying[0]
    group_col = varying[1] if len(varying) > 1 else None
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    if group_col is None:
        order = np.argsort(data[x_col])
        ax.plot(data[x_col][order], data["zeta_star"][order], marker="o")
        lines = 1
    else:
        lines = 0
        for gv in np.unique(data[group_col]):
            mask = data[group_col] == gv
            order = np.argsort(data[x_col][mask])
            ax.plot(data[x_col][mask][order], data["zeta_star"][mask][order],
                    marker="o", markersize=3,
                    label=f"{_AXIS_LABELS[group_col]} = {gv:g}")
            lines += 1
        ax.legend(frameon=False, fontsize=8)
    ax.set_xlabel(_AXIS_LABELS[x_col])
    ax.set_ylabel("adoption threshold")
    ax.set_ylim(-0.02, 1.02)
    fig.tight_layout()
    _save(fig, out_path)
    return {"x": x_col, "lines": lines}


def spring_layout(n: int, edges, seed: int = _LAYOUT_SEED, iterations: int = 120):
    """Deterministic force-directed embedding (Fruchterman-Reingold style)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    pos = rng.uniform(-1, 1, (n, 2))
    adj = np.zeros((n, n))
    for i, j, w in edges:
        adj[i, j] = max(adj[i, j], w)
        adj[j, i] = max(adj[j, i], w)
    k = 1.0 / np.sqrt(n)
    temperature = 0.1
    for it in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(delta, axis=2)
        np.fill_diagonal(dist, 1.0)
        repulse = (k * k / dist**2)[:, :, None] * delta
        attract = (adj * dist / k)[:, :, None] * delta / dist[:, :, None]
        force = repulse.sum(axis=1) - attract.sum(axis=1)
        norm = np.linalg.norm(force, axis=1, keepdims=True)
        norm[norm < 1e-12] = 1e-12
        step = temperature * (1.0 - it / iterations)
        pos += force / norm * np.minimum(norm, step)
    pos -= pos.mean(axis=0)
    scale = np.abs(pos).max()
    return pos / (scale if scale > 0 else 1.0)


def plot_network_state(n: int, edges, x, out_path: str, y=None,
                       seed: int = _LAYOUT_SEED) -> dict:
    """Network snapshot with nodes colored by action (+1 cyan, -1 red).

    When opinions are supplied they set the node edge shading so mismatch
    between action and opinion is visible.
    """
    x = np.asarray(x)
    if x.shape != (n,):
        raise SchemaError(f"state has {x.shape[0]} entries but the graph has {n} nodes")
    pos = spring_layout(n, edges, seed=seed)
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    drawn = set()
    for i, j, _ in edges:
        key = (min(i, j), max(i, j))
        if i == j or key in drawn:
            continue
        drawn.add(key)
        ax.plot(*zip(pos[i], pos[j]), color="#bbbbbb", linewidth=0.6, zorder=1)
    colors = [ACTION_COLORS[int(v)] for v in x]
    if y is not None:
        edgecolors = plt.get_cmap("coolwarm_r")((np.asarray(y) + 1) / 2)
    else:
        edgecolors = "#333333"
    ax.scatter(pos[:, 0], pos[:, 1], c=colors, edgecolors=edgecolors,
               linewidths=1.2, s=90, zorder=2)
    ax.set_aspect("equal")
    ax.axis("off")
    fig.tight_layout()
    _save(fig, out_path)
    return {"nodes": n, "distinct_colors": len(set(colors))}
