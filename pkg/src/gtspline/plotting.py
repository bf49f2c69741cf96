"""Figures for the command line reports (written to files, never shown)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .tmesh import IndexTMesh, extensions  # noqa: E402

__all__ = ["plot_mesh", "plot_pattern", "plot_surface"]


def _segments(mesh: IndexTMesh):
    for a, b in np.argwhere(mesh.hseg):
        i, j = a + mesh.ilo, b + mesh.jlo
        yield (i, i + 1), (j, j)
    for a, b in np.argwhere(mesh.vseg):
        i, j = a + mesh.ilo, b + mesh.jlo
        yield (i, i), (j, j + 1)


def plot_mesh(mesh: IndexTMesh, path, show_extensions: bool = True) -> None:
    """Index mesh with the active region shaded and T-junction extensions on top."""
    fig, ax = plt.subplots(figsize=(5, 5 * (mesh.jhi - mesh.jlo) / max(1, mesh.ihi - mesh.ilo)))
    ax.add_patch(plt.Rectangle((1, 1), mesh.mu - 1, mesh.nu - 1, color="0.88", zorder=0))
    for xs, ys in _segments(mesh):
        ax.plot(xs, ys, color="k", lw=1.0, zorder=1)
    if show_extensions:
        for e in extensions(mesh):
            (x0, y0), (x1, y1) = e.segment()
            color = "tab:red" if e.direction == "h" else "tab:blue"
            ax.plot([x0, x1], [y0, y1], color=color, lw=3.0, alpha=0.6, zorder=2)
            ax.plot(*e.junction, "o", color=color, ms=4, zorder=3)
    ax.set_aspect("equal")
    ax.set_xlim(mesh.ilo - 0.5, mesh.ihi + 0.5)
    ax.set_ylim(mesh.jlo - 0.5, mesh.jhi + 0.5)
    ax.set_xlabel("i")
    ax.set_ylabel("j")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_pattern(pattern, path, title: str = "") -> None:
    """Spy plot of a boolean matrix."""
    pattern = np.asarray(pattern, dtype=bool)
    fig, ax = plt.subplots(figsize=(6, 6 * max(1, pattern.shape[0]) / max(1, pattern.shape[1]) + 0.5))
    if pattern.size:
        ax.spy(pattern, markersize=3)
    ax.set_title(title)
    ax.set_xlabel("tensor-product anchor")
    ax.set_ylabel("T-mesh anchor")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_surface(pts: np.ndarray, path) -> None:
    """Shaded 3D view of a sampled surface grid ``(ns, nt, 3)``."""
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    ax.plot_surface(pts[..., 0], pts[..., 1], pts[..., 2], cmap="viridis", linewidth=0, antialiased=True)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
