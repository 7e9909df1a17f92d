"""Pseudospectra and eigenvector condition numbers.

The eps-pseudospectrum of M is {z : s_min(z - M) < eps}.  On a grid,
s_min comes from inverse power iteration on (z - M)^H (z - M) with two
O(n) tridiagonal solves per step.

For the ensembles the last column of z - M holds only (-c_1, z - a_1), so

    f(z) = ||(z - M) e_n|| = sqrt(|c_1|^2 + |z - a_1|^2)

has a disc as its eps-sublevel set.  Since s_min(z - M) <= f(z) the disc
always lies inside the pseudospectrum; the two sets need not coincide.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numba
import numpy as np
from numpy.typing import NDArray

from .eigensolve import SolverError, condition_number_R, eigen_pairs, eigenvalues_aberth, tri_solve
from .ensembles import EnsembleKind, TridiagMatrix, sample_ginibre, sample_scaled, scaling_factor
from .parallel import pmap
from .randsrc import RngStream

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PseudospectrumGrid:
    xs: NDArray[np.float64]
    ys: NDArray[np.float64]
    smin: NDArray[np.float64]  # shape (ny, nx)

    @property
    def z(self) -> NDArray[np.complex128]:
        return self.xs[None, :] + 1j * self.ys[:, None]

    @property
    def cell(self) -> float:
        return float(max(self.xs[1] - self.xs[0], self.ys[1] - self.ys[0]))

    def sublevel(self, eps: float) -> NDArray[np.bool_]:
        return self.smin < eps


@numba.njit(cache=True, nogil=True)
def _smin_one(dl: np.ndarray, d: np.ndarray, du: np.ndarray, z: complex, start: np.ndarray, tiny: float, rtol: float, maxit: int) -> float:
    a = z - d
    adl = -dl
    adu = -du
    # (z - M)^H is tridiagonal with conjugated, swapped off-diagonals
    hd = np.conj(a)
    hdl = np.conj(adu)
    hdu = np.conj(adl)
    x = start.copy()
    prev = np.inf
    for _ in range(maxit):
        y = tri_solve(hdl, hd, hdu, x, tiny)
        w = tri_solve(adl, a, adu, y, tiny)
        big = np.max(np.abs(w))
        if not np.isfinite(big) or big == 0.0:
            return 0.0
        # Rayleigh quotient of the inverse Gram matrix; x has unit norm
        mu = abs(np.sum(np.conj(x) * w))
        s = 1.0 / np.sqrt(mu) if mu > 0 else np.inf
        w = w / big
        x = w / np.sqrt(np.sum(np.abs(w) ** 2))
        if abs(s - prev) <= rtol * s:
            return s
        prev = s
    return prev


@numba.njit(cache=True, nogil=True)
def _smin_many(dl: np.ndarray, d: np.ndarray, du: np.ndarray, zs: np.ndarray, start: np.ndarray, tiny: float, rtol: float, maxit: int) -> np.ndarray:
    out = np.empty(zs.size)
    for k in range(zs.size):
        out[k] = _smin_one(dl, d, du, zs[k], start, tiny, rtol, maxit)
    return out


def smin(m: TridiagMatrix, z: NDArray[np.complex128] | complex, rtol: float = 1e-8, maxit: int = 200) -> NDArray[np.float64]:
    """s_min(z - M) at each z by inverse power iteration."""
    zs = np.ascontiguousarray(np.atleast_1d(np.asarray(z, dtype=complex)).ravel())
    g = np.random.default_rng(0x5A)
    start = g.standard_normal(m.n) + 1j * g.standard_normal(m.n)
    start /= np.linalg.norm(start)
    tiny = _EPS * max(m.frobenius(), 1e-300) * 1e-3
    out = _smin_many(m.sub, m.diag, m.sup, zs, start, tiny, rtol, maxit)
    return out.reshape(np.shape(z))


def default_box(radius: float) -> tuple[float, float, float, float]:
    return (-1.5 * radius, 1.5 * radius, -1.5 * radius, 1.5 * radius)


def smin_grid(m: TridiagMatrix, box: tuple[float, float, float, float], res: tuple[int, int] = (200, 200), workers: int | None = None, rtol: float = 1e-8) -> PseudospectrumGrid:
    """s_min(z - M) on a res[0] x res[1] grid spanning box = (x0, x1, y0, y1)."""
    nx, ny = res
    if nx < 2 or ny < 2:
        raise ValueError("grid needs at least 2x2 points")
    xs = np.linspace(box[0], box[1], nx)
    ys = np.linspace(box[2], box[3], ny)
    rows = pmap(lambda y: smin(m, xs + 1j * y, rtol=rtol), ys, workers)
    return PseudospectrumGrid(xs, ys, np.array(rows))


def last_column_norm(m: TridiagMatrix, z: NDArray[np.complex128]) -> NDArray[np.float64]:
    """||(z - M) e_n||, the functional whose sublevel sets are discs."""
    a1 = m.diag[-1]
    c1 = m.sup[-1] if m.n > 1 else 0.0
    return np.sqrt(np.abs(c1) ** 2 + np.abs(np.asarray(z) - a1) ** 2)


# ------------------------------------------------------------- the disc


@dataclass(frozen=True)
class Disc:
    center: complex
    radius2: float

    @property
    def empty(self) -> bool:
        return self.radius2 <= 0.0

    @property
    def radius(self) -> float:
        return float(np.sqrt(max(self.radius2, 0.0)))

    def contains(self, z: NDArray[np.complex128]) -> NDArray[np.bool_]:
        return np.abs(np.asarray(z) - self.center) ** 2 < self.radius2


def pseudospectrum_disc(kind: EnsembleKind | str, a1: complex, c1: complex, n: int, beta: float, eps: float) -> Disc:
    """Disc {|z - a1 g|^2 + |c1|^2 g^2 < eps^2} with g = 1/sqrt(2 n beta).

    a1 and c1 are unscaled entries; for T~ the value of c1 is forced to 1.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if EnsembleKind.parse(kind) is EnsembleKind.TTILDE:
        c1 = 1.0
    g = scaling_factor(n, beta)
    return Disc(complex(a1) * g, eps * eps - abs(c1) ** 2 * g * g)


@dataclass
class DiscCheck:
    disc: Disc
    eps: float
    cell: float
    mismatch_cells: float  # max distance of a misclassified point to the circle, in cells
    misclassified: int
    smin_extra_fraction: float  # grid share with s_min < eps outside the disc
    smin_violations: int  # points where s_min exceeds the last-column norm
    grid: PseudospectrumGrid | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {
            "center": [self.disc.center.real, self.disc.center.imag],
            "radius2": self.disc.radius2,
            "empty": self.disc.empty,
            "eps": self.eps,
            "cell": self.cell,
            "mismatch_cells": self.mismatch_cells,
            "misclassified": self.misclassified,
            "smin_extra_fraction": self.smin_extra_fraction,
            "smin_violations": self.smin_violations,
        }


def disc_vs_grid_check(m: TridiagMatrix, kind: EnsembleKind | str, n: int, beta: float, eps: float, box: tuple[float, float, float, float], res: tuple[int, int] = (200, 200), with_smin: bool = True, workers: int | None = None) -> DiscCheck:
    """Compare the analytic disc with the grid sublevel set of ||(z - M) e_n||.

    ``m`` is the scaled matrix; the disc is built from its unscaled a_1, c_1.
    Full s_min is computed alongside and its excess over the disc reported.
    """
    g = scaling_factor(n, beta)
    disc = pseudospectrum_disc(kind, m.diag[-1] / g, m.sup[-1] / g, n, beta, eps)
    xs = np.linspace(box[0], box[1], res[0])
    ys = np.linspace(box[2], box[3], res[1])
    z = xs[None, :] + 1j * ys[:, None]
    cell = float(max(xs[1] - xs[0], ys[1] - ys[0]))
    f = last_column_norm(m, z)
    grid_set = f < eps
    wrong = grid_set != disc.contains(z)
    if np.any(wrong):
        dist = np.abs(np.abs(z[wrong] - disc.center) - disc.radius)
        mismatch = float(dist.max() / cell)
    else:
        mismatch = 0.0
    extra, viol, grid = 0.0, 0, None
    if with_smin:
        grid = smin_grid(m, box, res, workers)
        extra = float(np.mean((grid.smin < eps) & ~disc.contains(z)))
        viol = int(np.sum(grid.smin > f * (1 + 1e-6)))
    return DiscCheck(disc, eps, cell, mismatch, int(wrong.sum()), extra, viol, grid)


def lipschitz_violations(grid: PseudospectrumGrid, slack: float = 2e-3) -> int:
    """Neighbouring grid points whose s_min differ by more than their distance + slack."""
    s = grid.smin
    dx = grid.xs[1] - grid.xs[0]
    dy = grid.ys[1] - grid.ys[0]
    bad = np.sum(np.abs(np.diff(s, axis=1)) > dx + slack)
    bad += np.sum(np.abs(np.diff(s, axis=0)) > dy + slack)
    return int(bad)


def nesting_holds(grid: PseudospectrumGrid, eps_values: list[float]) -> bool:
    eps_sorted = sorted(eps_values)
    sets = [grid.sublevel(e) for e in eps_sorted]
    return all(np.all(~a | b) for a, b in zip(sets, sets[1:]))


# ------------------------------------------------------ condition table


@dataclass
class ConditionSummary:
    kind: str
    n: int
    beta: float
    m: int
    kappas: NDArray[np.float64]
    failures: int

    @property
    def median(self) -> float:
        return float(np.median(self.kappas)) if self.kappas.size else float("nan")

    @property
    def mean(self) -> float:
        return float(np.mean(self.kappas)) if self.kappas.size else float("nan")

    @property
    def beyond_precision(self) -> int:
        """Draws whose kappa exceeds 1/eps, where the estimate is only a lower bound in spirit."""
        return int(np.sum(self.kappas * _EPS > 1.0))

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "beta": self.beta,
            "m": self.m,
            "mean": self.mean,
            "median": self.median,
            "min": float(np.min(self.kappas)) if self.kappas.size else float("nan"),
            "max": float(np.max(self.kappas)) if self.kappas.size else float("nan"),
            "failures": self.failures,
            "beyond_precision": self.beyond_precision,
        }


def _kappa_tridiag(kind: EnsembleKind, n: int, beta: float, s: RngStream) -> float | None:
    m = sample_scaled(kind, n, beta, s)
    try:
        spec = eigenvalues_aberth(m)
    except SolverError:
        return None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pairs = eigen_pairs(m, spec)
    return condition_number_R(pairs, gauge="unit")


def _kappa_ginibre(n: int, s: RngStream) -> float:
    a = sample_ginibre(n, s)
    _, vecs = np.linalg.eig(a)  # unit-norm columns
    return condition_number_R(vecs)


def condition_table(kind: str, n: int, m: int, beta: float, seed: int, workers: int | None = None) -> ConditionSummary:
    """kappa(R) over m draws with unit-norm eigenvectors; kind "ginibre" allowed."""
    if kind.lower() == "ginibre":
        vals = pmap(lambda j: _kappa_ginibre(n, RngStream(seed, j)), range(m), workers)
        label = "ginibre"
    else:
        k = EnsembleKind.parse(kind)
        vals = pmap(lambda j: _kappa_tridiag(k, n, beta, RngStream(seed, j)), range(m), workers)
        label = k.value
    good = np.array([v for v in vals if v is not None], dtype=float)
    return ConditionSummary(label, n, beta, m, good, sum(v is None for v in vals))
