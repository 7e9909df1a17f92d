"""Low-temperature limit: pathwise convergence of coupled draws.

All matrices of a :class:`CoupledDraw` share phases, diagonal and the
uniform variates that drive the chi moduli through their quantile
function, so T_beta moves continuously with beta.  With
r_j = beta j / 2 (or beta j for T~),

    chi_r(u) - sqrt(r)  ->  Phi^{-1}(u) / sqrt(2)    (beta -> inf),

which defines the limiting offset matrix Z.  Then, unscaled,

    T_beta = sqrt(beta/2) D + Z + o(1),    T~_beta = sqrt(beta) G + Z + o(1),

and the scaled spectra converge at rate 1/sqrt(beta) to those of
D / (2 sqrt n) and G / sqrt(2n).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import special

from . import randsrc
from .charpoly import leading_minors
from .eigensolve import EigenPair, NearDegenerateWarning, eigen_pairs, eigenvalues_qr, match_spectra, min_gap
from .ensembles import TridiagMatrix, scale, scaling_factor
from .randsrc import RngStream


def chi_quantile(k: NDArray[np.float64] | float, u: NDArray[np.float64] | float) -> NDArray[np.float64]:
    """Inverse CDF of chi_k at u."""
    return np.sqrt(2.0 * special.gammaincinv(0.5 * np.asarray(k, dtype=float), u))


@dataclass(frozen=True)
class CoupledDraw:
    kind: str  # "D" (general T) or "G" (T~)
    n: int
    betas: tuple[float, ...]
    diag: NDArray[np.complex128]
    theta: NDArray[np.float64]
    phi: NDArray[np.float64]
    u_sub: NDArray[np.float64]
    u_sup: NDArray[np.float64]

    @property
    def _j(self) -> NDArray[np.float64]:
        return np.arange(self.n - 1, 0, -1, dtype=float)

    def matrix(self, beta: float) -> TridiagMatrix:
        """Unscaled T_beta (kind D) or T~_beta (kind G) from the shared randomness."""
        if self.kind == "D":
            k = 0.5 * beta * self._j
            sub = chi_quantile(k, self.u_sub) * np.exp(1j * self.theta)
            sup = chi_quantile(k, self.u_sup) * np.exp(1j * self.phi)
        else:
            sub = chi_quantile(beta * self._j, self.u_sub) * np.exp(1j * self.theta)
            sup = np.ones(self.n - 1, dtype=complex)
        return TridiagMatrix(self.diag, sub, sup)

    def scaled(self, beta: float) -> TridiagMatrix:
        return scale(self.matrix(beta), scaling_factor(self.n, beta))

    def limit(self, beta: float | None = None) -> TridiagMatrix:
        """D_n, or G_n at the given beta (G keeps its 1/sqrt(beta) super-diagonal)."""
        root = np.sqrt(self._j)
        zero = np.zeros(self.n, dtype=complex)
        if self.kind == "D":
            return TridiagMatrix(zero, root * np.exp(1j * self.theta), root * np.exp(1j * self.phi))
        if beta is None:
            raise ValueError("G depends on beta")
        return TridiagMatrix(zero, root * np.exp(1j * self.theta), np.full(self.n - 1, 1.0 / np.sqrt(beta), dtype=complex))

    def limit_spectrum(self, beta: float | None = None) -> NDArray[np.complex128]:
        """Eigenvalue limit of the scaled matrix: lambda(D)/(2 sqrt n) or lambda(G)/sqrt(2n)."""
        lam = eigenvalues_qr(self.limit(beta)).eigenvalues
        return lam / (2.0 * np.sqrt(self.n)) if self.kind == "D" else lam / np.sqrt(2.0 * self.n)

    def offsets(self) -> TridiagMatrix:
        """Limiting Z = lim (unscaled matrix - its leading term)."""
        g_sub = special.ndtri(self.u_sub) / np.sqrt(2.0)
        g_sup = special.ndtri(self.u_sup) / np.sqrt(2.0)
        sub = g_sub * np.exp(1j * self.theta)
        sup = g_sup * np.exp(1j * self.phi) if self.kind == "D" else np.zeros(self.n - 1, dtype=complex)
        return TridiagMatrix(self.diag, sub, sup)

    def leading_term(self, beta: float) -> TridiagMatrix:
        lim = self.limit(beta)
        f = np.sqrt(beta / 2.0) if self.kind == "D" else np.sqrt(beta)
        return scale(lim, f)


def coupled_family(kind: str, n: int, betas: list[float] | tuple[float, ...], s: RngStream) -> CoupledDraw:
    """One coupled draw for the given ascending betas."""
    kind = kind.upper()
    if kind not in ("D", "G"):
        raise ValueError("kind must be D or G")
    betas = tuple(float(b) for b in betas)
    if n < 2 or list(betas) != sorted(betas) or min(betas) < 10:
        raise ValueError("need n >= 2 and ascending betas >= 10")
    diag = randsrc.complex_normal(s, n)
    theta = randsrc.uniform_phase(s, n - 1)
    phi = randsrc.uniform_phase(s, n - 1)
    u_sub = randsrc.uniform01(s, n - 1)
    u_sup = randsrc.uniform01(s, n - 1)
    return CoupledDraw(kind, n, betas, diag, theta, phi, u_sub, u_sup)


# ------------------------------------------------------------ perturbation


def perturbation_prediction(a: TridiagMatrix | NDArray[np.complex128], b: NDArray[np.complex128] | TridiagMatrix, eps: float, pairs: list[EigenPair]) -> NDArray[np.complex128]:
    """First-order eigenvalues of A + eps B: lambda_i + eps y_i^T B x_i / (y_i^T x_i)."""
    lams = np.array([p.lam for p in pairs])
    if min_gap(lams) < 1e-10 * max(np.abs(lams).max(), 1e-300):
        warnings.warn("eigenvalues of A are nearly degenerate", NearDegenerateWarning, stacklevel=2)
    bd = b.to_dense() if isinstance(b, TridiagMatrix) else np.asarray(b)
    out = np.empty(len(pairs), dtype=complex)
    for i, p in enumerate(pairs):
        out[i] = p.lam + eps * (p.left @ bd @ p.right) / (p.left @ p.right)
    return out


@dataclass(frozen=True)
class RateReport:
    betas: NDArray[np.float64]
    distances: NDArray[np.float64]
    slope: float

    def as_dict(self) -> dict:
        return {"betas": self.betas.tolist(), "distances": self.distances.tolist(), "slope": self.slope}


def matched_distances(draw: CoupledDraw) -> NDArray[np.float64]:
    out = []
    for beta in draw.betas:
        lim = draw.limit_spectrum(beta)
        lam = eigenvalues_qr(draw.scaled(beta)).eigenvalues
        perm = match_spectra(lim, lam)
        out.append(np.max(np.abs(lim - lam[perm])))
    return np.array(out)


def convergence_rate(draw: CoupledDraw) -> RateReport:
    """Least-squares slope of ln(max matched distance) against ln(beta)."""
    betas = np.array(draw.betas)
    if betas.size < 3 or betas[-1] / betas[0] < 100:
        raise ValueError("need at least 3 betas spanning 2 decades")
    dist = matched_distances(draw)
    slope = float(np.polyfit(np.log(betas), np.log(dist), 1)[0])
    return RateReport(betas, dist, slope)


# ------------------------------------------------------------ eigenvectors


def charpoly_eigenvectors(m: TridiagMatrix, lam: complex) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Right and left eigenvectors of m at eigenvalue lam from the minors P_k(lam).

    The entry in row n-1-k is P_k(lam)/(b_1...b_k) for the right vector and
    P_k(lam)/(c_1...c_k) for the left one (b below, c above the diagonal,
    in ensemble order).
    """
    p = leading_minors(m, lam)[: m.n]
    bprod = np.concatenate(([1.0], np.cumprod(m.b_indexed())))
    cprod = np.concatenate(([1.0], np.cumprod(m.c_indexed())))
    return (p / bprod)[::-1].copy(), (p / cprod)[::-1].copy()


def eigenvector_formula_residual(m: TridiagMatrix, lam: complex) -> float:
    """||(M - lam) u|| / (||M||_F ||u||) for the minor-based right vector."""
    u, _ = charpoly_eigenvectors(m, lam)
    return float(np.linalg.norm(m.matvec(u) - lam * u) / (m.frobenius() * np.linalg.norm(u)))


def fluctuation_prediction(draw: CoupledDraw) -> NDArray[np.complex128]:
    """Limit of sqrt(beta) (lambda_i(T_beta)/sqrt(2 n beta) - lambda_i(D)/(2 sqrt n)).

    Equals (1/sqrt(2n)) y^T Z u / y^T u with u, y written through the minors
    P_k of D, in the order of ``eigenvalues_qr(draw.limit())``.
    """
    if draw.kind != "D":
        raise ValueError("implemented for the general ensemble (kind D)")
    d = draw.limit()
    z = draw.offsets()
    n = draw.n
    b = d.b_indexed()
    c = d.c_indexed()
    bp = np.concatenate(([1.0], np.cumprod(b)))
    cp = np.concatenate(([1.0], np.cumprod(c)))
    za = z.a_indexed()
    zb = z.b_indexed()
    zc = z.c_indexed()
    out = []
    for lam in eigenvalues_qr(d).eigenvalues:
        p = leading_minors(d, lam)[:n]
        w = p * p / (bp[:n] * cp[:n])
        num = np.sum(w * za)
        num += np.sum(p[:-1] * p[1:] / (cp[: n - 1] * bp[1:n]) * zb)
        num += np.sum(p[1:] * p[:-1] / (cp[1:n] * bp[: n - 1]) * zc)
        out.append(num / np.sum(w) / np.sqrt(2.0 * n))
    return np.array(out)


def measured_fluctuation(draw: CoupledDraw, beta: float) -> NDArray[np.complex128]:
    """sqrt(beta) (lambda(T_beta scaled) - limit), matched to the limit order."""
    lim = draw.limit_spectrum()
    lam = eigenvalues_qr(draw.scaled(beta)).eigenvalues
    perm = match_spectra(lim, lam)
    return np.sqrt(beta) * (lam[perm] - lim)


def eigenvector_fluctuation(draw: CoupledDraw) -> NDArray[np.complex128]:
    """The same limit from inverse-iteration eigenvectors of D (independent path)."""
    d = draw.limit()
    spec = eigenvalues_qr(d)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearDegenerateWarning)
        pairs = eigen_pairs(d, spec)
    pred = perturbation_prediction(d, draw.offsets(), 1.0, pairs) - spec.eigenvalues
    return pred / np.sqrt(2.0 * draw.n)


# ------------------------------------------------------------ chi limit


def chi_limit_stats(r: float, count: int, s: RngStream) -> tuple[float, float]:
    """Sample mean and variance of chi_r - sqrt(r)."""
    x = randsrc.chi(s, np.full(count, float(r))) - np.sqrt(r)
    return float(x.mean()), float(x.var(ddof=1))
