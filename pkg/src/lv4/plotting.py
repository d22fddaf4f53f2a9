"""Matplotlib renderings of trajectories and stability diagrams.

Figures are written next to the CSV output; nothing here is needed for
the numbers themselves.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")

import numpy as np  # noqa: E402
from matplotlib import pyplot as plt  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

from .emit import atomic_write  # noqa: E402
from .lvmap import SPECIES, Trajectory  # noqa: E402
from .stability import Stability, StabilityGrid  # noqa: E402

# prey 1, prey 2, predator 1, predator 2
SPECIES_COLORS = ("tab:red", "tab:green", "black", "tab:blue")

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.dpi": 100,
    "savefig.dpi": 150,
}


def _save(fig, path):
    buf = io.BytesIO()
    fig.savefig(buf, format="png", bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return atomic_write(path, buf.getvalue())


def plot_trajectory(t: Trajectory, path, title: str | None = None):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(8, 4))
        gens = np.arange(len(t.states))
        for k, (name, color) in enumerate(zip(SPECIES, SPECIES_COLORS)):
            ax.plot(gens, t.states[:, k], ".", ms=1.5, color=color, label=name)
        ax.set_xlabel("generation")
        ax.set_ylabel("population")
        ax.set_xlim(0, max(len(gens) - 1, 1))
        ax.legend(loc="upper right", markerscale=6, ncol=4, frameon=False)
        if title:
            ax.set_title(title)
        return _save(fig, path)


def plot_diagram(grid: StabilityGrid, path, title: str | None = None):
    """Stable cells in red on the unit square, unstable cells shaded by rho."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 4.4))
        kind = grid.kind.T  # rows indexed by h2
        rho = np.where(kind == Stability.UNSTABLE, np.clip(grid.spectral_radius.T, 1.0, 2.0), np.nan)
        extent = (0.0, 1.0, 0.0, 1.0)
        im = ax.imshow(rho, origin="lower", extent=extent, cmap="Greys", vmin=1.0, vmax=2.0,
                       interpolation="nearest")
        stable = np.where(kind == Stability.STABLE, 1.0, np.nan)
        ax.imshow(stable, origin="lower", extent=extent, cmap=ListedColormap(["red"]),
                  interpolation="nearest")
        fig.colorbar(im, ax=ax, label="spectral radius (unstable cells)")
        ax.set_xlabel("$h_1$ (predator 1 effort on prey 1)")
        ax.set_ylabel("$h_2$ (predator 2 effort on prey 2)")
        ax.set_title(title or f"{grid.count(Stability.STABLE)} stable of {grid.resolution ** 2} cells")
        return _save(fig, path)
