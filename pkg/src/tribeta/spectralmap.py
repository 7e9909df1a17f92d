"""Spectral coordinates of a tridiagonal matrix and the map back.

A diagonalizable tridiagonal T with simple spectrum is fixed by
(Lambda, r, R1): the eigenvalues, the first row r of the eigenvector matrix
R and its first column R1.  The gauge makes every left eigenvector start
with 1, so the first column of R^{-1} is all ones and sum(r) = 1.

Reconstruction runs a two-sided Lanczos recurrence on the rows of R and
the columns of R^{-1}, reading one matrix entry per step.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .eigensolve import NearDegenerateWarning, Spectrum, eigen_pairs, eigenvalues_qr, gauged_eigenvectors, min_gap
from .ensembles import TridiagMatrix
from .specfun import gamma_ln

DEGENERACY_TOL = 1e-10


class ExceptionalSetError(ArithmeticError):
    """Input lies on the measure-zero set where the map breaks down."""


class ConsistencyError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SpectralData:
    lambdas: NDArray[np.complex128]
    r: NDArray[np.complex128]
    R1: NDArray[np.complex128]

    def __post_init__(self) -> None:
        for name in ("lambdas", "r", "R1"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.complex128))
        if not (self.lambdas.size == self.r.size == self.R1.size):
            raise ValueError("lambdas, r and R1 must have equal length")

    @property
    def n(self) -> int:
        return self.lambdas.size

    def rotated(self, phi: float) -> "SpectralData":
        """Same r and R1 with every eigenvalue multiplied by e^{i phi}."""
        return SpectralData(self.lambdas * np.exp(1j * phi), self.r, self.R1)


def near_degenerate(d: SpectralData, scale: float | None = None) -> bool:
    """True when the eigenvalue gap or some |r_j| is below 1e-10 relative."""
    if scale is None:
        scale = max(float(np.abs(d.lambdas).max()), 1e-300)
    return bool(min_gap(d.lambdas) < DEGENERACY_TOL * scale or np.abs(d.r).min() < DEGENERACY_TOL)


def decompose(m: TridiagMatrix, spectrum: Spectrum | None = None) -> SpectralData:
    """Spectral data in the gauge whose left eigenvectors all start with 1."""
    if spectrum is None:
        spectrum = eigenvalues_qr(m)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearDegenerateWarning)
        pairs = eigen_pairs(m, spectrum)
    try:
        rmat, _ = gauged_eigenvectors(pairs)
    except ZeroDivisionError as exc:
        raise ExceptionalSetError(str(exc)) from exc
    return SpectralData(spectrum.eigenvalues.copy(), rmat[0].copy(), rmat[:, 0].copy())


def _lanczos(lam: NDArray[np.complex128], r: NDArray[np.complex128], R1: NDArray[np.complex128] | None, rebiorth: bool) -> TridiagMatrix:
    n = lam.size
    rows = np.zeros((n, n), dtype=complex)  # rows of R
    cols = np.zeros((n, n), dtype=complex)  # columns of R^{-1}, stored as rows
    rows[0] = r
    cols[0] = 1.0
    diag = np.zeros(n, dtype=complex)
    sub = np.zeros(n - 1, dtype=complex)
    sup = np.zeros(n - 1, dtype=complex)
    for i in range(n):
        diag[i] = np.sum(rows[i] * lam * cols[i])
        if i == n - 1:
            break
        x = rows[i] * lam - diag[i] * rows[i]
        y = lam * cols[i] - diag[i] * cols[i]
        if i > 0:
            x -= sub[i - 1] * rows[i - 1]
            y -= sup[i - 1] * cols[i - 1]
        if rebiorth:
            for k in range(i + 1):
                x -= np.sum(x * cols[k]) * rows[k]
                y -= np.sum(rows[k] * y) * cols[k]
        xy = np.sum(x * y)
        if R1 is None:
            if xy == 0:
                raise ExceptionalSetError(f"off-diagonal vanishes at step {i + 1}; the matrix splits")
            sup[i] = sub[i] = np.sqrt(xy)
        else:
            if R1[i + 1] == 0 or x[0] == 0:
                raise ExceptionalSetError(f"super-diagonal entry vanishes at step {i + 1}")
            sup[i] = x[0] / R1[i + 1]
            if xy == 0:
                raise ExceptionalSetError(f"sub-diagonal entry vanishes at step {i + 1}")
            sub[i] = xy / sup[i]
        rows[i + 1] = x / sup[i]
        cols[i + 1] = y / sub[i]
    return TridiagMatrix(diag, sub, sup)


def reconstruct_general(d: SpectralData, rebiorth: bool = True) -> TridiagMatrix:
    """The unique tridiagonal matrix with spectral data d.

    ``rebiorth`` re-projects each new row/column pair against all previous
    ones; a no-op in exact arithmetic that keeps the recurrence stable.
    """
    if abs(np.sum(d.r) - 1.0) > 1e-8:
        raise ValueError("r must sum to 1")
    if np.any(d.r == 0) or np.any(d.R1 == 0):
        raise ExceptionalSetError("r and R1 must have no zero entries")
    return _lanczos(d.lambdas, d.r, d.R1, rebiorth)


def reconstruct_symmetric(lambdas: ArrayLike, r: ArrayLike, rebiorth: bool = True) -> TridiagMatrix:
    """Complex-symmetric tridiagonal matrix from (Lambda, r).

    Off-diagonals take the principal square root at every step, so they are
    fixed only up to sign.
    """
    lam = np.asarray(lambdas, dtype=complex)
    rr = np.asarray(r, dtype=complex)
    if abs(np.sum(rr) - 1.0) > 1e-8:
        raise ValueError("r must sum to 1")
    if np.any(rr == 0):
        raise ExceptionalSetError("r must have no zero entries")
    return _lanczos(lam, rr, None, rebiorth)


def reconstruction_error(a: TridiagMatrix, b: TridiagMatrix, sign_insensitive: bool = False) -> float:
    """||A - B||_F / ||A||_F, optionally ignoring the signs of off-diagonal pairs."""
    if sign_insensitive:
        d_sub = np.minimum(np.abs(a.sub - b.sub), np.abs(a.sub + b.sub))
        d_sup = np.minimum(np.abs(a.sup - b.sup), np.abs(a.sup + b.sup))
    else:
        d_sub = np.abs(a.sub - b.sub)
        d_sup = np.abs(a.sup - b.sup)
    num = np.sqrt(np.sum(np.abs(a.diag - b.diag) ** 2) + np.sum(d_sub**2) + np.sum(d_sup**2))
    return float(num / a.frobenius())


def vandermonde_residual(m: TridiagMatrix, d: SpectralData) -> float:
    """Relative mismatch of Delta(lambda)^2 and prod (b_j c_j)^j / prod r_j, in logs."""
    lam = d.lambdas
    iu = np.triu_indices(lam.size, 1)
    log_lhs = 2.0 * np.sum(np.log(lam[iu[0]] - lam[iu[1]]))
    bt = m.btilde()
    j = np.arange(1, bt.size + 1)
    log_rhs = np.sum(j * np.log(bt)) - np.sum(np.log(d.r))
    return float(abs(np.expm1(log_rhs - log_lhs)))


def g_function(m: TridiagMatrix, lambdas: ArrayLike) -> float:
    """Half the Schur defect: (||M||_F^2 - sum |lambda|^2) / 2."""
    f2 = m.frobenius() ** 2
    g = 0.5 * (f2 - float(np.sum(np.abs(np.asarray(lambdas)) ** 2)))
    if g < -1e-9 * f2:
        raise ConsistencyError(f"negative Schur defect {g:.3e}; eigenvalues do not belong to this matrix")
    return g


# ------------------------------------------------------------------ n = 2


def n2_entries(lam1: complex, lam2: complex, r1: complex, R2: complex) -> tuple[complex, complex, complex, complex]:
    """(a2, a1, c1, b1) of the 2x2 matrix with the given spectral data."""
    delta = lam1 - lam2
    a2 = r1 * delta + lam2
    a1 = -r1 * delta + lam1
    c1 = r1 * (1 - r1) * delta / R2
    b1 = R2 * delta
    return a2, a1, c1, b1


def _real_jacobian(p: NDArray[np.complex128], rel_step: float) -> NDArray[np.float64]:
    jac = np.zeros((8, 8))
    for k in range(8):
        h = rel_step * max(abs(p[k // 2]), 1.0)
        e = np.zeros(4, dtype=complex)
        e[k // 2] = h if k % 2 == 0 else 1j * h
        fp = np.array(n2_entries(*(p + e)))
        fm = np.array(n2_entries(*(p - e)))
        df = (fp - fm) / (2 * h)
        jac[0::2, k] = df.real
        jac[1::2, k] = df.imag
    return jac


def jacobian_residual_n2(d: SpectralData, rel_step: float = 1e-5) -> float:
    """Relative gap between a finite-difference |det J| and its closed form at n = 2.

    J is the real 8x8 Jacobian of (lambda1, lambda2, r1, R2) -> (a2, a1, c1, b1).
    """
    if d.n != 2:
        raise ValueError("jacobian_residual_n2 needs n = 2")
    p = np.array([d.lambdas[0], d.lambdas[1], d.r[0], d.R1[1]])
    a2, a1, c1, b1 = n2_entries(*p)
    delta = p[0] - p[1]
    r1, r2 = p[2], 1 - p[2]
    expected = abs(r1 * r2 * delta**4 / (c1 * b1 * p[3])) ** 2
    h = rel_step
    for _ in range(4):
        got = abs(np.linalg.det(_real_jacobian(p, h)))
        if np.isfinite(got) and got > 0:
            return float(abs(got - expected) / expected)
        h *= 10
    raise ExceptionalSetError("finite differences collapsed near the exceptional set")


def log_partition_T(n: int, beta: float) -> float:
    """ln Z for the general ensemble: pi^{3n-2} 2^{n(beta n - beta + 4)/4} prod_{k<n} Gamma(beta k / 4)^2."""
    if n < 1 or not beta > 0:
        raise ValueError("need n >= 1 and beta > 0")
    out = (3 * n - 2) * math.log(math.pi) + n * (beta * n - beta + 4) / 4 * math.log(2.0)
    out += 2.0 * sum(gamma_ln(beta * k / 4.0) for k in range(1, n))
    return out


# ------------------------------------------------------------ experiment


@dataclass
class RoundTripReport:
    draws: int
    flagged: int
    exceptional: int
    max_error: float  # general map, non-flagged draws
    max_error_symmetric: float  # sign-insensitive, S draws
    max_vandermonde: float

    @property
    def flagged_fraction(self) -> float:
        return self.flagged / self.draws if self.draws else 0.0

    def as_dict(self) -> dict:
        return {
            "draws": self.draws,
            "flagged": self.flagged,
            "flagged_fraction": self.flagged_fraction,
            "exceptional": self.exceptional,
            "max_error": self.max_error,
            "max_error_symmetric": self.max_error_symmetric,
            "max_vandermonde": self.max_vandermonde,
        }


def roundtrip_experiment(n_values: ArrayLike, m: int, beta: float, seed: int) -> RoundTripReport:
    """Decompose and rebuild m draws of T (and of S for the symmetric map).

    Draw j uses n = n_values[j % len(n_values)] and stream (seed, j).
    """
    from .ensembles import sample_S, sample_T
    from .randsrc import RngStream

    ns = [int(v) for v in np.atleast_1d(n_values)]
    flagged = exceptional = 0
    err = err_sym = vdm = 0.0
    for j in range(m):
        n = ns[j % len(ns)]
        t = sample_T(n, beta, RngStream(seed, j))
        try:
            d = decompose(t)
        except ExceptionalSetError:
            exceptional += 1
            continue
        if near_degenerate(d):
            flagged += 1
            continue
        err = max(err, reconstruction_error(t, reconstruct_general(d)))
        vdm = max(vdm, vandermonde_residual(t, d))
        s = sample_S(n, beta, RngStream(seed, m + j))
        ds = decompose(s)
        if not near_degenerate(ds):
            err_sym = max(err_sym, reconstruction_error(s, reconstruct_symmetric(ds.lambdas, ds.r), sign_insensitive=True))
    return RoundTripReport(m, flagged, exceptional, err, err_sym, vdm)
