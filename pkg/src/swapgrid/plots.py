"""Static figures for sweep results, configuration comparisons, and
sensitivity surfaces.

Everything renders through the Agg backend to SVG files with a fixed hash
salt and no embedded date, so rerunning a command reproduces the bytes.
"""

from __future__ import annotations

import math

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

plt.rcParams["svg.hashsalt"] = "swapgrid"

from .optimizer import SurfaceResult
from .regulation import RegulationMarket

__all__ = [
    "plot_sweep",
    "plot_radar",
    "plot_config_bars",
    "plot_surface",
    "plot_eta",
]

_AXIS_LABELS = {
    "demand": "demand scale s",
    "power": "charger power multiplier",
    "battery_cost": "battery cost multiplier",
}
_METRIC_LABELS = {
    "cost_density": "cost density (USD/day/km²)",
    "battery_density": "battery density (1/km²)",
    "avg_reg_capacity": "avg regulation capacity (kW/km²)",
}
_CONFIG_STYLE = {
    "centralized": dict(color="#1f77b4", linestyle="--"),
    "centralized+reg": dict(color="#1f77b4", linestyle="-"),
    "decentralized": dict(color="#d62728", linestyle="--"),
    "decentralized+reg": dict(color="#d62728", linestyle="-"),
}


def _save(fig, path) -> str:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return str(path)


def plot_sweep(points, metric: str, path) -> str:
    """One line per configuration along a sweep axis."""
    if metric not in _METRIC_LABELS:
        raise ValueError(f"unknown metric {metric!r}")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    labels = [rep.configuration.label for rep in points[0].reports]
    xs = [pt.value for pt in points]
    for i, label in enumerate(labels):
        ys = [getattr(pt.reports[i], metric) for pt in points]
        ax.plot(xs, ys, marker="o", markersize=3,
                label=label, **_CONFIG_STYLE.get(label, {}))
    ax.set_xlabel(_AXIS_LABELS.get(points[0].axis, points[0].axis))
    ax.set_ylabel(_METRIC_LABELS[metric])
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)


def plot_radar(reports, scores: np.ndarray, path) -> str:
    """Normalized three-metric radar across configurations."""
    metrics = ["cost", "batteries", "regulation"]
    angles = [2.0 * math.pi * k / len(metrics) for k in range(len(metrics))]
    angles.append(angles[0])
    fig = plt.figure(figsize=(5.0, 5.0))
    ax = fig.add_subplot(111, polar=True)
    for rep, row in zip(reports, scores):
        vals = list(row) + [row[0]]
        label = rep.configuration.label
        style = _CONFIG_STYLE.get(label, {})
        ax.plot(angles, vals, label=label, color=style.get("color"),
                linestyle=style.get("linestyle", "-"))
        ax.fill(angles, vals, alpha=0.08, color=style.get("color"))
    ax.set_xticks(angles[:-1])
    ax.set_xticklabels(metrics)
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="upper right", bbox_to_anchor=(1.25, 1.1), fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_config_bars(reports, path) -> str:
    """Raw metric bars, one panel per metric."""
    fig, axes = plt.subplots(1, 3, figsize=(10.0, 3.4))
    labels = [rep.configuration.label for rep in reports]
    xs = np.arange(len(labels))
    for ax, metric in zip(axes, _METRIC_LABELS):
        vals = [getattr(rep, metric) for rep in reports]
        colors = [_CONFIG_STYLE.get(lb, {}).get("color", "#777") for lb in labels]
        ax.bar(xs, vals, color=colors)
        ax.set_xticks(xs)
        ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=7)
        ax.set_ylabel(_METRIC_LABELS[metric], fontsize=8)
        ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)


def plot_surface(surface: SurfaceResult, path, best=None) -> str:
    """Cost heatmap over the (rho_c, Q) design grid."""
    fig, ax = plt.subplots(figsize=(6.0, 4.4))
    cost = np.where(surface.infeasible, np.nan, surface.cost)
    mesh = ax.pcolormesh(surface.q_values, surface.rho_values, cost,
                         shading="nearest", cmap="viridis")
    ax.set_yscale("log")
    ax.set_xlabel("re-order quantity Q (batteries)")
    ax.set_ylabel("charging-station density ρ_c (1/km²)")
    fig.colorbar(mesh, ax=ax, label="cost density (USD/day/km²)")
    if best is not None:
        ax.plot([best.q], [best.rho_c], marker="*", markersize=12,
                color="white", markeredgecolor="black")
    fig.tight_layout()
    return _save(fig, path)


def plot_eta(market: RegulationMarket, path) -> str:
    """Per-period minimum capacity fraction, as a step profile."""
    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    periods = np.arange(market.n_periods)
    ax.step(periods, market.eta, where="mid", color="#2ca02c")
    ax.set_xlabel("period of day (h)")
    ax.set_ylabel("η_z (fraction of bid)")
    ax.set_ylim(0.0, 1.0)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)
