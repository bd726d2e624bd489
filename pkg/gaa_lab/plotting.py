"""
Minimal SVG plots of the datasets: polylines, points, axes and the
mobility-edge line in its own stroke.
"""
import logging

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

logger = logging.getLogger(__name__)

ME_COLOR = "#2ca02c"
CURVE_COLOR = "#FF7700"

# Fixed salt and no date keep repeated SVG output byte-identical
plt.rcParams["svg.hashsalt"] = "gaa-lab"
SVG_METADATA = {"Date": None}


def add_curve_to_plot(ax, xs, ys, color=CURVE_COLOR, weight=1.2, opacity=0.9, label=None, dashed=False):
    """
    Add one polyline to an axes.

    Args:
        ax: matplotlib Axes
        xs, ys: Sample coordinates
        color: Stroke colour
        weight: Stroke width
        opacity: Stroke opacity (0-1)
        label: Optional legend label
        dashed: Draw with a dashed stroke

    Returns:
        The Line2D that was added
    """
    line, = ax.plot(
        xs, ys,
        color=color,
        linewidth=weight,
        alpha=opacity,
        linestyle="--" if dashed else "-",
        label=label,
    )
    return line


def add_points_to_plot(ax, xs, ys, color=CURVE_COLOR, size=9, label=None):
    return ax.scatter(xs, ys, s=size, color=color, label=label)


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    logger.info("wrote plot %s", path)


def plot_site_energies(table, path, title=None):
    """Point plot of eps_mu/Delta vs mu from a site_energy_table frame"""
    fig, ax = plt.subplots(figsize=(6, 4))
    add_points_to_plot(ax, table["mu"], table["eps_over_delta"])
    ax.set_xlabel("mu")
    ax.set_ylabel("eps_mu / Delta")
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_energy_curves(curve_set, path, title=None):
    """
    One polyline per assigned site, plus the mobility edge (green, dashed)
    wherever it is defined.
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    palette = plt.get_cmap("viridis")
    n_curves = max(len(curve_set.curves), 1)
    for i, curve in enumerate(sorted(curve_set.curves, key=lambda c: c.mu)):
        add_curve_to_plot(ax, curve_set.grid, curve.values, color=palette(i / n_curves), label=f"mu={curve.mu}")

    if curve_set.me_line is not None:
        me_line = np.asarray(curve_set.me_line, dtype=float)
        # alpha sweeps break the edge at alpha = 0
        me_line = np.where(np.abs(me_line) > 1e6, np.nan, me_line)
        add_curve_to_plot(ax, curve_set.grid, me_line, color=ME_COLOR, weight=2.0, opacity=1.0, label="ME", dashed=True)
        finite = [c.values for c in curve_set.curves] or [me_line]
        low = np.nanmin([np.nanmin(v) for v in finite])
        high = np.nanmax([np.nanmax(v) for v in finite])
        pad = 0.1 * (high - low) if high > low else 1.0
        ax.set_ylim(low - pad, high + pad)

    ax.set_xlabel("Delta / J" if curve_set.variable == "delta_over_j" else "alpha")
    ax.set_ylabel("E / J")
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_pr_scan(frame, path, title=None):
    """PR/N vs Delta/J (finite rows only)"""
    finite = frame[np.isfinite(frame["delta_over_j"])]
    fig, ax = plt.subplots(figsize=(6, 4))
    add_curve_to_plot(ax, finite["delta_over_j"], finite["pr_over_n"])
    ax.set_xlabel("Delta / J")
    ax.set_ylabel("PR / N")
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_spectrum(table, path, me_energy=None, title=None):
    """IPR vs E/J of an oracle spectrum, with the mobility-edge energy marked"""
    fig, ax = plt.subplots(figsize=(6, 4))
    add_points_to_plot(ax, table["energy_over_j"], table["ipr"])
    if me_energy is not None:
        ax.axvline(me_energy, color=ME_COLOR, linestyle="--", linewidth=2.0, label="ME")
    ax.set_yscale("log")
    ax.set_xlabel("E / J")
    ax.set_ylabel("IPR")
    if title:
        ax.set_title(title)
    _save(fig, path)
