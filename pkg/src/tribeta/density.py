"""Limiting eigenvalue density, radial statistics and KS distances.

The limiting law of the scaled spectrum is rotation invariant with density

    rho(z) = (e / 2 pi) (ln 2 - 1 - ln |z|^2),   |z| <= r0 = sqrt(2/e),

and zero outside.  Two radial normalizations are used:

* area:  P(|z| <= r) = 2 pi int_0^r s rho(s) ds, the law of the moduli;
* flat:  F(r) = int_0^r rho(s) ds / int_0^r0 rho(s) ds, the density
  normalized against dr.  Its empirical counterpart weights each modulus
  by 1/r, which undoes the Jacobian r of the polar area element.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

LN2 = float(np.log(2.0))
R0 = float(np.sqrt(2.0 / np.e))


def support_radius() -> float:
    """sqrt(2/e), the edge of the limiting support."""
    return R0


def limiting_density(z: ArrayLike) -> NDArray[np.float64] | float:
    r2 = np.abs(np.asarray(z)) ** 2
    inside = r2 <= R0 * R0
    with np.errstate(divide="ignore"):
        val = np.e / (2 * np.pi) * (LN2 - 1.0 - np.log(r2))
    out = np.where(inside, np.maximum(val, 0.0), 0.0)
    return float(out) if out.ndim == 0 else out


def radial_moment(k: int) -> float:
    """int_0^r0 r^{2k+1} rho(r) dr = (2/e)^k / (2 pi (k+1)^2)."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    return (2.0 / np.e) ** k / (2.0 * np.pi * (k + 1) ** 2)


def radial_moment_quad(k: int) -> float:
    """The same moment by adaptive quadrature; independent check of the closed form."""
    # the log singularity sits at r = 0 where r^{2k+1} kills it
    val, _ = integrate.quad(lambda r: r ** (2 * k + 1) * limiting_density(r), 0.0, R0, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def total_mass_quad() -> float:
    """2 pi int_0^r0 r rho(r) dr by quadrature, which should equal 1."""
    val, _ = integrate.quad(lambda r: 2 * np.pi * r * limiting_density(r), 0.0, R0, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def limiting_flat_cdf(r: ArrayLike) -> NDArray[np.float64] | float:
    """F(r) = r (ln 2 + 1 - 2 ln r) / (2 r0) on [0, r0], clipped to 1 beyond."""
    rr = np.asarray(r, dtype=float)
    if np.any(rr < 0):
        raise ValueError("radius must be non-negative")
    safe = np.where(rr > 0, np.minimum(rr, R0), 1.0)
    val = safe * (LN2 + 1.0 - 2.0 * np.log(safe)) / (2.0 * R0)
    out = np.where(rr <= 0, 0.0, np.where(rr >= R0, 1.0, val))
    return float(out) if out.ndim == 0 else out


def limiting_area_cdf(r: ArrayLike) -> NDArray[np.float64] | float:
    """P(|z| <= r) = (e r^2 / 2) ln(2 / r^2) under the limiting law."""
    rr = np.asarray(r, dtype=float)
    safe = np.where(rr > 0, np.minimum(rr, R0), 1.0)
    val = 0.5 * np.e * safe**2 * np.log(2.0 / safe**2)
    out = np.where(rr <= 0, 0.0, np.where(rr >= R0, 1.0, val))
    return float(out) if out.ndim == 0 else out


def disc_flat_cdf(r: ArrayLike) -> NDArray[np.float64] | float:
    """Flat radial CDF of the uniform law on the unit disc: min(r, 1)."""
    out = np.clip(np.asarray(r, dtype=float), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


# ------------------------------------------------------------ empirical


@dataclass(frozen=True)
class EmpiricalCDF:
    """Step CDF of sorted samples with optional positive weights."""

    values: NDArray[np.float64]
    weights: NDArray[np.float64] | None = None

    @classmethod
    def from_samples(cls, x: ArrayLike, weights: ArrayLike | None = None) -> "EmpiricalCDF":
        x = np.asarray(x, dtype=float).ravel()
        if x.size == 0:
            raise ValueError("need at least one sample")
        order = np.argsort(x, kind="stable")
        w = None if weights is None else np.asarray(weights, dtype=float).ravel()[order]
        if w is not None and (w.size != x.size or np.any(~(w > 0))):
            raise ValueError("weights must be positive and match the samples")
        return cls(x[order], w)

    @classmethod
    def radial(cls, z: ArrayLike, mode: str = "flat") -> "EmpiricalCDF":
        """CDF of |z|; ``flat`` weights each modulus by 1/|z|."""
        r = np.abs(np.asarray(z)).ravel()
        if mode == "area":
            return cls.from_samples(r)
        if mode != "flat":
            raise ValueError(f"unknown mode {mode!r}")
        r = np.maximum(r, np.finfo(float).tiny)
        return cls.from_samples(r, 1.0 / r)

    @property
    def count(self) -> int:
        return self.values.size

    def steps(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """CDF value just after and just before each sorted sample."""
        if self.weights is None:
            upper = np.arange(1, self.count + 1) / self.count
        else:
            c = np.cumsum(self.weights)
            upper = c / c[-1]
        lower = np.concatenate(([0.0], upper[:-1]))
        return upper, lower

    def __call__(self, x: ArrayLike) -> NDArray[np.float64]:
        upper, _ = self.steps()
        idx = np.searchsorted(self.values, np.asarray(x, dtype=float), side="right")
        return np.where(idx > 0, upper[np.maximum(idx - 1, 0)], 0.0)


def ks_distance(e: EmpiricalCDF, cdf: Callable[[NDArray[np.float64]], ArrayLike]) -> float:
    """sup_x |F(x) - G(x)| for a continuous model CDF F."""
    f = np.asarray(cdf(e.values), dtype=float)
    upper, lower = e.steps()
    return float(max(np.max(np.abs(f - upper)), np.max(np.abs(f - lower))))


def ks_two_sample(e1: EmpiricalCDF, e2: EmpiricalCDF) -> float:
    """sup_x |G1(x) - G2(x)| over the pooled jump points."""
    grid = np.concatenate((e1.values, e2.values))
    return float(np.max(np.abs(e1(grid) - e2(grid))))


# ------------------------------------------------------------ histogram


@dataclass(frozen=True)
class RadialHistogram:
    edges: NDArray[np.float64]
    counts: NDArray[np.float64]
    density: NDArray[np.float64]
    mode: str

    @property
    def centres(self) -> NDArray[np.float64]:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def mass(self) -> float:
        """Integral of the density over the bins under the histogram's measure."""
        if self.mode == "flat":
            return float(np.sum(self.density * np.diff(self.edges)))
        return float(np.sum(self.density * np.pi * np.diff(self.edges**2)))


def radial_histogram(moduli: ArrayLike, bins: int = 100, mode: str = "flat", r_max: float | None = None) -> RadialHistogram:
    """Histogram of moduli as a density.

    ``flat``: weights 1/r, normalized to unit integral in dr; estimates rho(r)
    up to the constant 1/int rho dr.  ``area``: counts per unit disc area,
    an estimate of rho(z) itself.  Samples beyond r_max are dropped from the
    bins but still count in the normalization.
    """
    if bins < 1:
        raise ValueError("bins must be at least 1")
    r = np.abs(np.asarray(moduli, dtype=float)).ravel()
    if r_max is None:
        r_max = 1.05 * R0
    edges = np.linspace(0.0, r_max, bins + 1)
    counts, _ = np.histogram(r, bins=edges)
    counts = counts.astype(float)
    if mode == "flat":
        w = 1.0 / np.maximum(r, np.finfo(float).tiny)
        wsum, _ = np.histogram(r, bins=edges, weights=w)
        dens = wsum / (w.sum() * np.diff(edges))
    elif mode == "area":
        dens = counts / (r.size * np.pi * np.diff(edges**2))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return RadialHistogram(edges, counts, dens, mode)


def limiting_flat_density(r: ArrayLike) -> NDArray[np.float64]:
    """rho(r) normalized against dr, the curve a flat histogram estimates."""
    return np.asarray(limiting_density(r)) * np.pi / (np.e * R0)
