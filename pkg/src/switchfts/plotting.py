"""Static figures for closed-loop trajectories, written as SVG files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .linalg import Subspace  # noqa: E402

STYLE = {
    "font.family": "serif",
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (5.0, 3.4),
    "svg.hashsalt": "switchfts",
}


def _as_float(states):
    return np.array([[float(v) for v in x] for x in states], dtype=float)


def plot_norm_log(trajectories, path, labels=None, title=None):
    """Semilog plot of |x(t)| against t; zero states are left off the log axis."""
    labels = labels or [None] * len(trajectories)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for traj, label in zip(trajectories, labels):
            X = _as_float(traj.states)
            norms = np.linalg.norm(X, axis=1)
            t = np.arange(len(norms))
            keep = norms > 0
            ax.semilogy(t[keep], norms[keep], marker="o", ms=3, lw=1, label=label)
        ax.set_xlabel("t")
        ax.set_ylabel(r"$\|x(t)\|$")
        if title:
            ax.set_title(title)
        if any(labels):
            ax.legend()
        ax.grid(True, which="both", lw=0.3)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


def plot_states(trajectories, path, labels=None, subspaces: list[Subspace] | None = None, title=None):
    """State-space path for n = 3 (3-D line plot), component-vs-time otherwise.

    ``subspaces`` of dimension 1 or 2 in R^3 are drawn as a segment or a
    translucent patch around the origin.
    """
    labels = labels or [None] * len(trajectories)
    n = len(trajectories[0].x0)
    with plt.rc_context(STYLE):
        if n == 3:
            fig = plt.figure(figsize=(5.0, 4.2))
            ax = fig.add_subplot(projection="3d")
            extent = max(float(np.abs(_as_float(t.states)).max()) for t in trajectories) or 1.0
            for E in subspaces or []:
                _draw_subspace(ax, E, extent)
            for traj, label in zip(trajectories, labels):
                X = _as_float(traj.states)
                ax.plot(X[:, 0], X[:, 1], X[:, 2], marker="o", ms=3, lw=1, label=label)
            ax.scatter([0], [0], [0], color="k", s=12)
            ax.set_xlabel("$x_1$")
            ax.set_ylabel("$x_2$")
            ax.set_zlabel("$x_3$")
        else:
            fig, ax = plt.subplots()
            for traj, label in zip(trajectories, labels):
                X = _as_float(traj.states)
                for i in range(X.shape[1]):
                    tag = f"{label}: $x_{i + 1}$" if label else f"$x_{i + 1}$"
                    ax.plot(np.arange(len(X)), X[:, i], marker="o", ms=3, lw=1, label=tag)
            ax.set_xlabel("t")
            ax.grid(True, lw=0.3)
        if title:
            ax.set_title(title)
        if any(labels) or n != 3:
            ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


def _draw_subspace(ax, E: Subspace, extent: float):
    vecs = [np.array([float(v) for v in q]) for q in E.vectors()]
    vecs = [v / np.linalg.norm(v) * extent for v in vecs]
    if len(vecs) == 1:
        v = vecs[0]
        ax.plot([-v[0], v[0]], [-v[1], v[1]], [-v[2], v[2]], ls="--", lw=0.8, color="gray")
    elif len(vecs) == 2:
        s = np.linspace(-1, 1, 2)
        a, b = np.meshgrid(s, s)
        P = a[..., None] * vecs[0] + b[..., None] * vecs[1]
        ax.plot_surface(P[..., 0], P[..., 1], P[..., 2], alpha=0.15, color="gray")
