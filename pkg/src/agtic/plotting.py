"""Figure rendering for AGTIC maps and power reports.

Figures are drawn with the object-oriented matplotlib API (no pyplot
state) and saved with a fixed SVG hash salt and no date stamp, so the
same data always produces the same file.
"""

import math

import matplotlib as mpl
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

STYLE = {
    "font.family": "sans-serif",
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "image.cmap": "viridis",
    "svg.hashsalt": "agtic",
    "svg.fonttype": "path",
}

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def figsize(width=4.0, ratio=GOLDEN):
    return (width, width * ratio)


def _save(fig, path):
    FigureCanvasAgg(fig)
    metadata = {"Date": None} if str(path).endswith(".svg") else None
    with mpl.rc_context(STYLE):
        fig.savefig(path, metadata=metadata, bbox_inches="tight")


def map_matrix(evaluation):
    """``k x k`` array of grid values indexed ``[u_index, l_index]``; NaN off-grid."""
    levels = evaluation.grid.levels
    index = {v: i for i, v in enumerate(levels)}
    out = np.full((len(levels), len(levels)), np.nan)
    for (l, u), v in zip(evaluation.grid.pairs, evaluation.values):
        out[index[u], index[l]] = v
    return out


def plot_agtic_map(evaluation, path, title=None):
    """Heatmap of transformed dCor over ``(l, u)`` with the maximum marked."""
    with mpl.rc_context(STYLE):
        fig = Figure(figsize=(3.4, 3.0))
        ax = fig.add_subplot()
        levels = np.asarray(evaluation.grid.levels)
        step = levels[1] - levels[0]
        extent = (levels[0] - step / 2, levels[-1] + step / 2,
                  levels[0] - step / 2, levels[-1] + step / 2)
        im = ax.imshow(map_matrix(evaluation), origin="lower", extent=extent,
                       vmin=0.0, vmax=1.0, interpolation="nearest")
        l_best, u_best = evaluation.argmax_pair
        ax.plot([l_best], [u_best], marker="x", color="red", markersize=10,
                markeredgewidth=2.0, linestyle="none")
        ax.set_xlabel("lower threshold l")
        ax.set_ylabel("upper threshold u")
        ax.set_xticks(levels)
        ax.set_yticks(levels)
        if title:
            ax.set_title(title)
        fig.colorbar(im, ax=ax, label="transformed dCor")
        _save(fig, path)


def plot_power(result, path):
    """One panel per pattern: power against the axis value, one line per method."""
    cells = result.cells
    patterns = list(dict.fromkeys(c.pattern for c in cells))
    methods = list(dict.fromkeys(c.method for c in cells))
    axis_kind = result.manifest.get("axis", {}).get("kind", "noise")
    with mpl.rc_context(STYLE):
        ncols = min(len(patterns), 5) or 1
        nrows = max(1, math.ceil(len(patterns) / ncols))
        fig = Figure(figsize=(2.4 * ncols, 2.0 * nrows + 0.6))
        axes = fig.subplots(nrows, ncols, squeeze=False, sharey=True)
        for ax in axes.flat[len(patterns):]:
            ax.set_visible(False)
        for ax, pattern in zip(axes.flat, patterns):
            for method in methods:
                sel = [c for c in cells if c.pattern == pattern and c.method == method]
                xs = [c.axis_value for c in sel]
                ax.plot(xs, [c.power for c in sel], marker="o", markersize=3,
                        linewidth=1.0, label=method)
            if axis_kind == "noise" and len(set(xs)) > 1:
                ax.set_xscale("log")
            ax.set_title(pattern)
            ax.set_ylim(-0.05, 1.05)
            ax.set_xlabel({"noise": "noise sigma", "sample_size": "sample size m"}
                          .get(axis_kind, "sigma"))
        for ax in axes[:, 0]:
            ax.set_ylabel("power")
        handles, labels = axes.flat[0].get_legend_handles_labels()
        fig.legend(handles, labels, loc="lower center", ncol=min(len(methods), 6),
                   frameon=False)
        fig.subplots_adjust(bottom=0.28 if nrows == 1 else 0.15)
        _save(fig, path)
