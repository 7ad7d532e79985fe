"""
Static SVG figures: band diagrams, eigenvalue curves and parameter rectangles.
"""

import logging
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

logger = logging.getLogger(__name__)

# drop the creation date so repeated runs write identical files
SVG_METADATA = {"Date": None}


def _save(fig, path: str):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    logger.info(f"Wrote {path}")


def plot_bands(bands: Sequence[Tuple[float, float]], path: str, title: str = "Spectral bands"):
    fig, ax = plt.subplots(figsize=(4, 6))
    for k, (lo, hi) in enumerate(bands):
        ax.fill_between([0.0, 1.0], lo, hi, color="tab:blue", alpha=0.5, linewidth=0)
        ax.hlines([lo, hi], 0.0, 1.0, colors="tab:blue", linewidth=0.8)
        ax.text(1.02, 0.5 * (lo + hi), f"k={k}", va="center", fontsize=8)
    ax.set_xlim(0.0, 1.2)
    ax.set_xticks([])
    ax.set_ylabel("lambda")
    ax.set_title(title)
    _save(fig, path)


def plot_curves(curves: Dict[int, List[Tuple[float, float]]], path: str,
                title: str = "Eigenvalue branches"):
    """One polyline per branch from (theta, lambda) pairs."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for k in sorted(curves):
        thetas = [p[0] for p in curves[k]]
        lams = [p[1] for p in curves[k]]
        ax.plot(thetas, lams, label=f"k={k}")
    ax.set_xlabel("theta")
    ax.set_ylabel("lambda")
    ax.set_title(title)
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_rectangle(corners: Sequence[Tuple[float, float]], crossings: Sequence[Tuple[float, float]],
                   path: str, xlabel: str = "theta", ylabel: str = "lambda",
                   labels: Sequence[str] = ("1", "2", "3", "4")):
    """A closed parameter rectangle with its located conjugate points."""
    fig, ax = plt.subplots(figsize=(5, 4))
    xs = [c[0] for c in corners] + [corners[0][0]]
    ys = [c[1] for c in corners] + [corners[0][1]]
    ax.plot(xs, ys, color="black", linewidth=1.0)
    for i, label in enumerate(labels):
        mx, my = 0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[i] + ys[i + 1])
        ax.annotate(label, (mx, my), fontsize=9, ha="center", va="center",
                    bbox={"boxstyle": "round", "fc": "white", "ec": "none"})
    if crossings:
        ax.scatter([c[0] for c in crossings], [c[1] for c in crossings], color="tab:red", zorder=3, s=18)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    _save(fig, path)
