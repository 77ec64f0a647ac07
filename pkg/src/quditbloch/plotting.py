"""Figures written next to trajectory and validation output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .basis import basis_labels  # noqa: E402

__all__ = ["plot_trajectory", "plot_cross_check"]


def _local_columns(traj):
    system = traj.system
    states = traj.states.reshape((len(traj.times),) + system.shape)
    for q, spin in enumerate(system.spins):
        labels = basis_labels(spin)
        idx = [0] * system.count
        idx[q] = slice(1, None)
        block = states[(slice(None),) + tuple(idx)]
        yield q, spin, labels[1:], block


def plot_trajectory(traj, path, *, max_lines: int = 8) -> Path:
    """Local Bloch components per qudit plus monitor drift."""
    system = traj.system
    ncols = system.count + 1
    fig, axes = plt.subplots(1, ncols, figsize=(4.2 * ncols, 3.4), squeeze=False)
    axes = axes[0]
    t = traj.times
    for q, spin, labels, block in _local_columns(traj):
        ax = axes[q]
        # the largest-amplitude components carry the picture
        order = np.argsort(-np.max(np.abs(block), axis=0))[:max_lines]
        for j in sorted(order):
            ax.plot(t, block[:, j], lw=1.2, label=labels[j].short)
        ax.set_title(f"qudit {q + 1} (S = {spin})")
        ax.set_xlabel("t")
        ax.set_ylabel("R")
        ax.legend(fontsize=7, ncol=2, frameon=False)
    ax = axes[-1]
    for name, values in traj.monitors.items():
        if name == "min_eig":
            continue
        ax.plot(t, values - values[0], lw=1.2, label=name)
    ax.set_title("invariant drift")
    ax.set_xlabel("t")
    ax.ticklabel_format(axis="y", style="sci", scilimits=(-3, 3))
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_cross_check(report, path, *, tol: float | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.4))
    err = np.maximum(report.per_time, np.finfo(float).tiny)
    ax.semilogy(report.times, err, lw=1.4, label="max |R_bloch - R_oracle|")
    if tol is not None:
        ax.axhline(tol, color="k", ls="--", lw=0.8, label="tolerance")
    ax.set_xlabel("t")
    ax.set_ylabel("error")
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
