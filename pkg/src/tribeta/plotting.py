"""Static figures written next to the delimited outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from numpy.typing import NDArray  # noqa: E402

from .density import RadialHistogram  # noqa: E402


def _finish(fig: plt.Figure, path: str | Path, title: str) -> Path:
    fig.suptitle(title, fontsize=9)
    fig.tight_layout()
    path = Path(path)
    # fixed metadata keeps reruns byte-identical
    fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else {"Software": None})
    plt.close(fig)
    return path


def radial_histogram_figure(hist: RadialHistogram, curve_r: NDArray[np.float64], curve: NDArray[np.float64], path: str | Path, title: str) -> Path:
    """Bars of the histogram with the analytic curve overlaid."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(hist.edges[:-1], hist.density, width=np.diff(hist.edges), align="edge", alpha=0.6, label="empirical")
    ax.plot(curve_r, curve, "k-", lw=1.2, label="limit")
    ax.set_xlabel("|z|")
    ax.set_ylabel("density" + (" (flat)" if hist.mode == "flat" else " (area)"))
    ax.legend(fontsize=8)
    return _finish(fig, path, title)


def spectrum_figure(z: NDArray[np.complex128], path: str | Path, title: str, radius: float | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.plot(z.real.ravel(), z.imag.ravel(), ",", alpha=0.5)
    if radius is not None:
        t = np.linspace(0, 2 * np.pi, 400)
        ax.plot(radius * np.cos(t), radius * np.sin(t), "k--", lw=0.8)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    return _finish(fig, path, title)


def pseudospectrum_figure(xs: NDArray[np.float64], ys: NDArray[np.float64], smin: NDArray[np.float64], eigs: NDArray[np.complex128], path: str | Path, title: str, disc: tuple[complex, float] | None = None) -> Path:
    """log10 s_min contours with eigenvalues and the analytic disc."""
    fig, ax = plt.subplots(figsize=(4.5, 4))
    cs = ax.contour(xs, ys, np.log10(np.maximum(smin, 1e-16)), levels=np.arange(-8, 1), cmap="viridis", linewidths=0.8)
    ax.clabel(cs, fontsize=6, fmt="%d")
    ax.plot(eigs.real, eigs.imag, "k.", ms=2)
    if disc is not None and disc[1] > 0:
        t = np.linspace(0, 2 * np.pi, 400)
        c, r = disc
        ax.plot(c.real + r * np.cos(t), c.imag + r * np.sin(t), "r-", lw=1)
    ax.set_aspect("equal")
    return _finish(fig, path, title)


def curves_figure(curves: dict[str, tuple[NDArray[np.float64], NDArray[np.float64]]], path: str | Path, title: str, xlabel: str, ylabel: str, loglog: bool = False) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for label, (x, y) in curves.items():
        ax.plot(x, y, "o-" if loglog else "-", ms=3, label=label)
    if loglog:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    return _finish(fig, path, title)


def bar_figure(labels: list[str], values: list[float], path: str | Path, title: str, ylabel: str) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(labels, values)
    ax.set_yscale("log")
    ax.set_ylabel(ylabel)
    return _finish(fig, path, title)
