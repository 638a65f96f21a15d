"""Render figure datasets to SVG with matplotlib."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import ValidationError  # noqa: E402
from .scan import FigureDataset  # noqa: E402

MAX_POINTS = 50_000
COLORS = {"violating": "#3a9d3a", "fulfilling": "#f2c230"}
LINESTYLES = {"solid": "-", "dot-dashed": "-.", "dashed": "--"}
CURVE_COLORS = {"solid": "black", "dot-dashed": "black", "dashed": "#1f4fd1"}

plt.rcParams["svg.hashsalt"] = "wclass-bell"


def thin(n: int, max_points: int) -> np.ndarray:
    """Evenly spaced indices selecting at most ``max_points`` of ``n`` points."""
    if n <= max_points:
        return np.arange(n)
    return np.unique(np.linspace(0, n - 1, max_points).round().astype(int))


def render_svg(dataset: FigureDataset, path, width: float = 6.0, height: float = 4.5,
               max_points: int = MAX_POINTS) -> Path:
    """Write a scatter of the dataset, coloured by region, with its boundary curves.

    Point clouds larger than ``max_points`` are thinned deterministically; the
    CSV export keeps every point.  Scatter groups carry the SVG ids
    ``scatter-violating`` / ``scatter-fulfilling`` and curves ``curve-<name>``.
    """
    if len(dataset) == 0 and not dataset.curves:
        raise ValidationError("nothing to render: dataset has no points and no curves")
    path = Path(path)
    keep = thin(len(dataset), max_points)
    x, y, viol = dataset.x[keep], dataset.y[keep], dataset.violating[keep]

    fig, ax = plt.subplots(figsize=(width, height))
    try:
        for label, mask in (("fulfilling", ~viol), ("violating", viol)):
            if np.any(mask):
                ax.scatter(x[mask], y[mask], s=1.5, c=COLORS[label], linewidths=0,
                           label=label, gid=f"scatter-{label}", rasterized=False)
        for curve in dataset.curves:
            ax.plot(curve.x, curve.y, LINESTYLES.get(curve.style, "-"),
                    color=CURVE_COLORS.get(curve.style, "black"), lw=1.4, gid=f"curve-{curve.name}")
        pad_x = 0.02 * (dataset.x_range[1] - dataset.x_range[0])
        pad_y = 0.02 * (dataset.y_range[1] - dataset.y_range[0])
        ax.set_xlim(dataset.x_range[0] - pad_x, dataset.x_range[1] + pad_x)
        ax.set_ylim(dataset.y_range[0] - pad_y, dataset.y_range[1] + pad_y)
        ax.set_xlabel(dataset.x_label)
        ax.set_ylabel(dataset.y_label)
        ax.set_title(dataset.figure_id)
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    finally:
        plt.close(fig)
    return path
