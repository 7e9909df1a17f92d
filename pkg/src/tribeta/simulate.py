"""Batched experiments: many scaled spectra and the statistics built on them."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .density import EmpiricalCDF, disc_flat_cdf, ks_distance, ks_two_sample, limiting_flat_cdf
from .eigensolve import eigenvalues, matched_distance
from .ensembles import EnsembleKind, sample_ginibre, sample_scaled
from .parallel import pmap
from .randsrc import RngStream


def sample_spectra(kind: EnsembleKind | str, n: int, beta: float, m: int, seed: int, solver: str = "aberth", workers: int | None = None) -> NDArray[np.complex128]:
    """(m, n) eigenvalues of scaled matrices; row j uses stream (seed, j)."""
    kind = EnsembleKind.parse(kind)

    def one(j: int) -> NDArray[np.complex128]:
        return eigenvalues(sample_scaled(kind, n, beta, RngStream(seed, j)), solver).eigenvalues

    return np.array(pmap(one, range(m), workers))


def both_solvers(kind: EnsembleKind | str, n: int, beta: float, m: int, seed: int, workers: int | None = None) -> tuple[NDArray[np.complex128], NDArray[np.float64]]:
    """Aberth spectra plus the max matched distance to QR, per realization."""
    kind = EnsembleKind.parse(kind)

    def one(j: int) -> tuple[NDArray[np.complex128], float]:
        mat = sample_scaled(kind, n, beta, RngStream(seed, j))
        a = eigenvalues(mat, "aberth").eigenvalues
        q = eigenvalues(mat, "qr").eigenvalues
        return a, matched_distance(q, a) / mat.frobenius()

    res = pmap(one, range(m), workers)
    return np.array([r[0] for r in res]), np.array([r[1] for r in res])


def ginibre_spectra(n: int, m: int, seed: int, workers: int | None = None) -> NDArray[np.complex128]:
    return np.array(pmap(lambda j: np.linalg.eigvals(sample_ginibre(n, RngStream(seed, j))), range(m), workers))


@dataclass
class KSReport:
    kind: str
    n: int
    beta: float | None
    m: int
    seed: int
    d: float
    runtime_s: float
    eigenvalues: NDArray[np.complex128] = field(repr=False)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n, "beta": self.beta, "m": self.m, "seed": self.seed, "d": self.d, "runtime_s": self.runtime_s}


def ks_experiment(kind: str, n: int, beta: float, m: int, seed: int, solver: str = "aberth", workers: int | None = None) -> KSReport:
    """Flat-measure KS distance of the pooled scaled spectrum to its limit.

    ``kind`` may be "ginibre", compared with the uniform law on the unit disc.
    """
    t0 = time.perf_counter()
    if kind.lower() == "ginibre":
        z = ginibre_spectra(n, m, seed, workers)
        d = ks_distance(EmpiricalCDF.radial(z, "flat"), disc_flat_cdf)
        label, b = "ginibre", None
    else:
        k = EnsembleKind.parse(kind)
        z = sample_spectra(k, n, beta, m, seed, solver, workers)
        d = ks_distance(EmpiricalCDF.radial(z, "flat"), limiting_flat_cdf)
        label, b = k.value, float(beta)
    return KSReport(label, n, b, m, seed, d, time.perf_counter() - t0, z)


def ks_between(z1: NDArray[np.complex128], z2: NDArray[np.complex128], mode: str = "flat") -> float:
    """Two-sample radial KS distance."""
    return ks_two_sample(EmpiricalCDF.radial(z1, mode), EmpiricalCDF.radial(z2, mode))


def fraction_inside(z: NDArray[np.complex128], radius: float) -> float:
    return float(np.mean(np.abs(z) < radius))
