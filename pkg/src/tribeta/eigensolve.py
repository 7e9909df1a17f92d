"""Eigenvalues and eigenvectors of complex tridiagonal matrices.

Two independent eigenvalue routes:

* ``eigenvalues_qr``: complex single-shift Francis QR with Wilkinson shifts
  on the (already Hessenberg) matrix, O(n^3); the reference path.
* ``eigenvalues_aberth``: Aberth-Ehrlich iteration on det(z - M) evaluated
  by the scaled three-term recurrence, O(n^2) per sweep; the fast path.

Eigenvectors come from inverse iteration with a pivoted tridiagonal LU.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numba
import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from scipy.optimize import linear_sum_assignment

from .charpoly import _scaled_eval
from .ensembles import TridiagMatrix

_EPS = np.finfo(float).eps
HUNGARIAN_MAX_N = 200


class SolverError(RuntimeError):
    def __init__(self, message: str, partial: NDArray[np.complex128] | None = None):
        super().__init__(message)
        self.partial = partial


class NearDegenerateWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: NDArray[np.complex128]
    method: str
    residuals: NDArray[np.float64] | None = None
    iterations: int = 0


@dataclass(frozen=True)
class EigenPair:
    lam: complex
    right: NDArray[np.complex128]  # M right = lam right
    left: NDArray[np.complex128]  # left^T M = lam left^T


# ------------------------------------------------------------------ QR


@numba.njit(cache=True, nogil=True)
def _abs1(z: complex) -> float:
    return abs(z.real) + abs(z.imag)


@numba.njit(cache=True, nogil=True)
def _givens(x: complex, y: complex) -> tuple[float, complex]:
    ax = abs(x)
    ay = abs(y)
    if ay == 0.0:
        return 1.0, 0j
    if ax == 0.0:
        return 0.0, np.conj(y) / ay
    r = np.hypot(ax, ay)
    return ax / r, (x / ax) * np.conj(y) / r


@numba.njit(cache=True, nogil=True)
def _francis_qr(h: np.ndarray, max_iter: int) -> tuple[np.ndarray, int, int]:
    """Eigenvalues of upper Hessenberg h (overwritten).

    Returns (eigenvalues, index of the lowest unfinished row or -1, sweeps).
    """
    n = h.shape[0]
    eig = np.zeros(n, dtype=np.complex128)
    hnorm = 0.0
    for i in range(n):
        for j in range(max(0, i - 1), n):
            hnorm += _abs1(h[i, j])
    if hnorm == 0.0:
        hnorm = 1.0
    eps = 2.220446049250313e-16
    hi = n - 1
    its = 0
    total = 0
    while hi >= 0:
        l = hi
        while l > 0:
            tst = _abs1(h[l - 1, l - 1]) + _abs1(h[l, l])
            if tst == 0.0:
                tst = hnorm
            if _abs1(h[l, l - 1]) <= eps * tst:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            eig[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        if total >= max_iter:
            return eig, hi, total
        its += 1
        total += 1
        a = h[hi - 1, hi - 1]
        b = h[hi - 1, hi]
        c = h[hi, hi - 1]
        d = h[hi, hi]
        if its % 11 == 10:
            mu = d + 0.75 * _abs1(c)
        else:
            m = 0.5 * (a - d)
            disc = np.sqrt(m * m + b * c)
            mu1 = 0.5 * (a + d) + disc
            mu2 = 0.5 * (a + d) - disc
            mu = mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2
        x = h[l, l] - mu
        y = h[l + 1, l]
        for k in range(l, hi):
            if k > l:
                x = h[k, k - 1]
                y = h[k + 1, k - 1]
            cs, sn = _givens(x, y)
            for j in range(max(l, k - 1), hi + 1):
                t1 = h[k, j]
                t2 = h[k + 1, j]
                h[k, j] = cs * t1 + sn * t2
                h[k + 1, j] = -np.conj(sn) * t1 + cs * t2
            for i in range(l, min(k + 2, hi) + 1):
                t1 = h[i, k]
                t2 = h[i, k + 1]
                h[i, k] = cs * t1 + np.conj(sn) * t2
                h[i, k + 1] = -sn * t1 + cs * t2
            if k > l:
                h[k + 1, k - 1] = 0.0
    return eig, -1, total


def _solver_form(m: TridiagMatrix) -> TridiagMatrix:
    # symmetric balancing keeps entries O(sqrt|b c|); the unit-super-diagonal
    # form would inflate eigenvalue condition numbers
    if m.n > 1 and np.all(m.sub * m.sup != 0):
        return m.symmetrized()
    return m


def eigenvalues_qr(m: TridiagMatrix, max_iter_per_n: int = 100) -> Spectrum:
    """All eigenvalues by shifted QR (reference solver, O(n^3))."""
    work = _solver_form(m).to_dense()
    eig, left_over, sweeps = _francis_qr(work, max_iter_per_n * m.n)
    if left_over >= 0:
        raise SolverError(f"QR did not converge; rows 0..{left_over} unfinished", eig[left_over + 1 :])
    return Spectrum(eig, "qr", iterations=sweeps)


# --------------------------------------------------------------- Aberth


@numba.njit(cache=True, nogil=True)
def _aberth(a: np.ndarray, bt: np.ndarray, z: np.ndarray, tol: float, max_sweeps: int) -> tuple[np.ndarray, int, bool]:
    n = z.size
    done = np.zeros(n, dtype=np.bool_)
    for sweep in range(max_sweeps):
        finished = True
        for i in range(n):
            if done[i]:
                continue
            p, d, _ = _scaled_eval(a, bt, z[i])
            if p == 0:
                done[i] = True
                continue
            if d == 0:
                z[i] += tol * (1.0 + 1.0j)
                finished = False
                continue
            newton = p / d
            s = 0j
            zi = z[i]
            for j in range(n):
                if j != i:
                    s += 1.0 / (zi - z[j])
            w = newton / (1.0 - newton * s)
            z[i] = zi - w
            if abs(w) <= tol:
                done[i] = True
            else:
                finished = False
        if finished:
            return z, sweep + 1, True
    return z, max_sweeps, False


def eigenvalues_aberth(m: TridiagMatrix, max_sweeps: int = 500, rel_tol: float = 1e-12) -> Spectrum:
    """All eigenvalues by Aberth-Ehrlich iteration on the characteristic polynomial.

    Starting points fill a disc about trace/n on a golden-angle spiral.  The
    disc radius is 1.1 times the RMS entry size of the symmetrically
    balanced matrix.  A circle start is much slower for these spectra: the
    roots fill a disc and creep inward from the rim over hundreds of sweeps.
    """
    n = m.n
    a = np.ascontiguousarray(m.a_indexed())
    bt = np.ascontiguousarray(m.btilde())
    if n == 1:
        return Spectrum(a.copy(), "aberth")
    centre = a.mean()
    radius = 1.1 * np.sqrt((np.sum(np.abs(a - centre) ** 2) + 2 * np.sum(np.abs(bt))) / n)
    if radius == 0.0:
        return Spectrum(np.full(n, centre), "aberth")
    k = np.arange(n) + 0.5
    z0 = centre + radius * np.sqrt(k / n) * np.exp(1j * np.pi * (3.0 - np.sqrt(5.0)) * k)
    z, sweeps, ok = _aberth(a, bt, z0.astype(np.complex128), rel_tol * radius, max_sweeps)
    if not ok:
        raise SolverError(f"Aberth iteration exceeded {max_sweeps} sweeps", z)
    return Spectrum(z, "aberth", iterations=sweeps)


def eigenvalues(m: TridiagMatrix, solver: str = "aberth") -> Spectrum:
    if solver == "qr":
        return eigenvalues_qr(m)
    if solver == "aberth":
        return eigenvalues_aberth(m)
    raise ValueError(f"unknown solver {solver!r}")


# ------------------------------------------------------- matching helpers


def match_spectra(x: NDArray[np.complex128], y: NDArray[np.complex128]) -> NDArray[np.intp]:
    """Permutation p with y[p] as close as possible to x.

    Hungarian assignment up to n = 200, greedy closest-pair beyond.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.size != y.size:
        raise ValueError("spectra differ in size")
    dist = np.abs(x[:, None] - y[None, :])
    if x.size <= HUNGARIAN_MAX_N:
        rows, cols = linear_sum_assignment(dist)
        perm = np.empty(x.size, dtype=np.intp)
        perm[rows] = cols
        return perm
    order = np.argsort(dist, axis=None, kind="stable")
    perm = np.full(x.size, -1, dtype=np.intp)
    used = np.zeros(x.size, dtype=bool)
    left = x.size
    for flat in order:
        i, j = divmod(int(flat), x.size)
        if perm[i] < 0 and not used[j]:
            perm[i] = j
            used[j] = True
            left -= 1
            if left == 0:
                break
    return perm


def matched_distance(x: NDArray[np.complex128], y: NDArray[np.complex128]) -> float:
    """Largest distance between optimally matched eigenvalues."""
    perm = match_spectra(x, y)
    return float(np.max(np.abs(np.asarray(x) - np.asarray(y)[perm])))


# --------------------------------------------------------- eigenvectors


@numba.njit(cache=True, nogil=True)
def tri_solve(dl: np.ndarray, d: np.ndarray, du: np.ndarray, rhs: np.ndarray, tiny: float) -> np.ndarray:
    """Solve a tridiagonal system by Gaussian elimination with row pivoting.

    dl, d, du are the sub-, main and super-diagonals.  Zero pivots are
    replaced by ``tiny``, the usual device for inverse iteration.
    """
    n = d.size
    dd = d.copy()
    ddu = du.copy()
    ddl = dl.copy()
    b = rhs.copy()
    du2 = np.zeros(max(n - 2, 0), dtype=np.complex128)
    for i in range(n - 1):
        if abs(dd[i]) >= abs(ddl[i]):
            if dd[i] == 0:
                dd[i] = tiny
            f = ddl[i] / dd[i]
            dd[i + 1] -= f * ddu[i]
            b[i + 1] -= f * b[i]
        else:
            f = dd[i] / ddl[i]
            dd[i] = ddl[i]
            tmp = dd[i + 1]
            dd[i + 1] = ddu[i] - f * tmp
            if i < n - 2:
                du2[i] = ddu[i + 1]
                ddu[i + 1] = -f * du2[i]
            ddu[i] = tmp
            tb = b[i]
            b[i] = b[i + 1]
            b[i + 1] = tb - f * b[i + 1]
    if dd[n - 1] == 0:
        dd[n - 1] = tiny
    x = np.empty(n, dtype=np.complex128)
    x[n - 1] = b[n - 1] / dd[n - 1]
    if n > 1:
        x[n - 2] = (b[n - 2] - ddu[n - 2] * x[n - 1]) / dd[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (b[i] - ddu[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i]
    return x


@numba.njit(cache=True, nogil=True)
def _tri_matvec(dl: np.ndarray, d: np.ndarray, du: np.ndarray, x: np.ndarray) -> np.ndarray:
    y = d * x
    n = d.size
    for i in range(n - 1):
        y[i + 1] += dl[i] * x[i]
        y[i] += du[i] * x[i + 1]
    return y


@numba.njit(cache=True, nogil=True)
def _normalized(v: np.ndarray) -> np.ndarray:
    # prescale: a nearly singular solve can push sum |v|^2 past the float range
    big = np.max(np.abs(v))
    if not np.isfinite(big) or big == 0.0:
        return v
    w = v / big
    return w / np.sqrt(np.sum(np.abs(w) ** 2))


@numba.njit(cache=True, nogil=True)
def _inverse_iteration(dl: np.ndarray, d: np.ndarray, du: np.ndarray, lams: np.ndarray, start: np.ndarray, tiny: float, steps: int, target: float) -> tuple[np.ndarray, np.ndarray]:
    n = d.size
    k = lams.size
    vecs = np.empty((k, n), dtype=np.complex128)
    res = np.empty(k)
    for j in range(k):
        v = start.copy()
        best = start.copy()
        rbest = np.inf
        for _ in range(steps):
            v = _normalized(tri_solve(dl, d - lams[j], du, v, tiny))
            r = _tri_matvec(dl, d, du, v) - lams[j] * v
            rj = np.sqrt(np.sum(np.abs(r) ** 2))
            if rj < rbest:
                best = v
                rbest = rj
            # strongly non-normal matrices: further steps can drift away
            if rj <= target or rj > rbest:
                break
        vecs[j] = best
        res[j] = rbest
    return vecs, res


def _start_vector(n: int) -> NDArray[np.complex128]:
    g = np.random.default_rng(0x7E1D)
    v = g.standard_normal(n) + 1j * g.standard_normal(n)
    return v / np.linalg.norm(v)


def min_gap(lams: NDArray[np.complex128]) -> float:
    lams = np.asarray(lams)
    if lams.size < 2:
        return np.inf
    d = np.abs(lams[:, None] - lams[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def eigen_pairs(m: TridiagMatrix, spectrum: Spectrum | NDArray[np.complex128], steps: int = 3) -> list[EigenPair]:
    """Right and left eigenvectors (unit 2-norm) by inverse iteration."""
    lams = np.ascontiguousarray(spectrum.eigenvalues if isinstance(spectrum, Spectrum) else spectrum, dtype=np.complex128)
    scale = max(m.frobenius(), np.abs(lams).max(initial=0.0), 1e-300)
    gap = min_gap(lams)
    if gap < 1e-10 * scale:
        warnings.warn(f"eigenvalue gap {gap:.3e} is below 1e-10 of the matrix scale", NearDegenerateWarning, stacklevel=2)
    tiny = _EPS * scale
    target = 4 * _EPS * scale
    start = _start_vector(m.n)
    right, _ = _inverse_iteration(m.sub, m.diag, m.sup, lams, start, tiny, steps, target)
    left, _ = _inverse_iteration(m.sup, m.diag, m.sub, lams, start, tiny, steps, target)
    return [EigenPair(complex(lams[i]), right[i], left[i]) for i in range(lams.size)]


def residuals(m: TridiagMatrix, pairs: list[EigenPair]) -> NDArray[np.float64]:
    """||M v - lambda v|| / ||M||_F for unit right vectors."""
    f = m.frobenius() or 1.0
    return np.array([np.linalg.norm(m.matvec(p.right) - p.lam * p.right) / np.linalg.norm(p.right) / f for p in pairs])


# ------------------------------------------------------ condition numbers


def gauged_eigenvectors(pairs: list[EigenPair]) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """(R, L) with L R = 1 and every left vector scaled to first entry 1.

    R has the right eigenvectors as columns, L the left ones as rows, so the
    first column of L is all ones.
    """
    lefts = np.array([p.left for p in pairs])
    rights = np.array([p.right for p in pairs])
    first = lefts[:, 0]
    if np.any(np.abs(first) < 1e-300):
        raise ZeroDivisionError("a left eigenvector has vanishing first component")
    lefts = lefts / first[:, None]
    norm = np.einsum("ij,ij->i", lefts, rights)
    rights = rights / norm[:, None]
    return rights.T.copy(), lefts


def _unit_columns(r: NDArray[np.complex128]) -> NDArray[np.complex128]:
    return r / np.linalg.norm(r, axis=0)[None, :]


def extreme_singular_values(r: NDArray[np.complex128], rtol: float = 1e-10, max_iter: int = 1000) -> tuple[float, float]:
    """(s_max, s_min) of a square matrix by power and inverse power iteration."""
    n = r.shape[0]
    g = np.random.default_rng(0x51)
    x = g.standard_normal(n) + 1j * g.standard_normal(n)
    x /= np.linalg.norm(x)
    smax = 0.0
    for _ in range(max_iter):
        y = r.conj().T @ (r @ x)
        est = np.sqrt(abs(np.vdot(x, y)))
        x = y / np.linalg.norm(y)
        if abs(est - smax) <= rtol * est:
            smax = est
            break
        smax = est
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu = scipy.linalg.lu_factor(r, check_finite=False)
    if np.any(np.diag(lu[0]) == 0) or not np.all(np.isfinite(lu[0])):
        return smax, 0.0
    x = g.standard_normal(n) + 1j * g.standard_normal(n)
    x /= np.linalg.norm(x)
    inv_est = 0.0
    for _ in range(max_iter):
        u = scipy.linalg.lu_solve(lu, x, trans=2, check_finite=False)
        w = scipy.linalg.lu_solve(lu, u, check_finite=False)
        est = abs(np.vdot(x, w))
        nw = np.linalg.norm(w)
        if not np.isfinite(nw) or nw == 0:
            return smax, 0.0
        x = w / nw
        if abs(est - inv_est) <= rtol * est:
            inv_est = est
            break
        inv_est = est
    return smax, 1.0 / np.sqrt(inv_est)


def condition_number_R(pairs: list[EigenPair] | NDArray[np.complex128], gauge: str = "unit") -> float:
    """kappa(R) = s_max / s_min of the eigenvector matrix.

    gauge "spectral": columns scaled so R^{-1} has an all-ones first column;
    gauge "unit": unit 2-norm columns.  A raw matrix is used as given.
    Returns inf for a numerically singular R.
    """
    if isinstance(pairs, np.ndarray):
        r = pairs
    else:
        r, _ = gauged_eigenvectors(pairs)
        if gauge == "unit":
            r = _unit_columns(r)
        elif gauge != "spectral":
            raise ValueError(f"unknown gauge {gauge!r}")
    smax, smin = extreme_singular_values(r)
    return np.inf if smin == 0.0 else smax / smin
