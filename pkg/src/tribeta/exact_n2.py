"""Closed forms at n = 2: joint eigenvalue densities and one-point densities.

These are large-beta (steepest descent) approximations.  With
a = beta/2 + 1 and x = |lambda|^2:

    rho_T(lambda)  = e^{-x} 2F2(a, a; 1, a + 1/2; x/2) / (pi 2F1(a, a; a + 1/2; 1/2))
    rho_S(lambda)  = e^{-x} 1F1(a; 1; x/2) / (pi 2^a)
    rho_T~(lambda) = e^{-x} sum_k x^k J_{a+k} / (k!)^2 / (pi J0_a)

where J_mu = int_0^inf t^{mu-1} e^{-t^2/2 - t} dt = Gamma(mu) e^{1/4} D_{-mu}(1)
and J0_mu = Gamma(mu) D_{-mu}(0) = 2^{mu/2-1} Gamma(mu/2).  Everything is
evaluated in logs: for beta in the hundreds the pieces overflow doubles.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy import integrate, special

from . import specfun
from .density import EmpiricalCDF, ks_distance
from .ensembles import EnsembleKind, sample
from .parallel import pmap
from .randsrc import RngStream
from .specfun import SpecFunAccuracyError

LOW_BETA = 10.0
TAIL_RTOL = 1e-8
_ANCHOR_EVERY = 32


class LowBetaWarning(UserWarning):
    """The n = 2 formulas are large-beta approximations."""


def _check_beta(beta: float) -> None:
    if not beta > 0:
        raise ValueError("beta must be positive")
    if beta < LOW_BETA:
        warnings.warn(f"beta = {beta} < {LOW_BETA}: the n = 2 formulas assume beta >> 1", LowBetaWarning, stacklevel=3)


# ------------------------------------------------------------------ jpdf


def _log_norm_jpdf(kind: EnsembleKind, beta: float) -> float:
    """ln of the integral of the unnormalized jpdf over C^2.

    The centre of mass contributes pi; the rest is a radial integral in
    rho = |lambda_1 - lambda_2| with a Gamma-function closed form.
    """
    lp = math.log(2 * math.pi) + math.log(math.pi)
    if kind is EnsembleKind.T:
        # int rho^{b+1} K0(rho^2/4) = 2^{b+1} int t^{b/2} K0(t) dt
        mu = beta / 2 + 1
        return lp + (beta + 1) * math.log(2) + (mu - 2) * math.log(2) + 2 * math.lgamma(mu / 2)
    if kind is EnsembleKind.S:
        return lp - math.log(2) + (beta / 2 + 1) * math.log(4) + math.lgamma(beta / 2 + 1)
    return lp - math.log(4) + (beta + 2) / 4 * math.log(32) + math.lgamma((beta + 2) / 4)


def jpdf_log_normalizer(kind: EnsembleKind | str, beta: float) -> float:
    """ln C_beta making the jpdf integrate to one."""
    return -_log_norm_jpdf(EnsembleKind.parse(kind), beta)


def jpdf_n2(kind: EnsembleKind | str, lam1: complex, lam2: complex, beta: float) -> float:
    """Normalized large-beta joint density of the two eigenvalues."""
    kind = EnsembleKind.parse(kind)
    _check_beta(beta)
    d2 = abs(lam1 - lam2) ** 2
    if d2 == 0.0:
        return 0.0
    expo = -0.5 * (abs(lam1) ** 2 + abs(lam2) ** 2) + 0.5 * beta * math.log(d2)
    if kind is EnsembleKind.T:
        k0 = specfun.bessel_k0(0.25 * d2)
        expo += 0.25 * d2 + math.log(k0.value)
    elif kind is EnsembleKind.TTILDE:
        expo += 0.25 * d2 - d2 * d2 / 32.0
    elif kind is not EnsembleKind.S:
        raise ValueError("n = 2 formulas exist for T, S and Ttilde")
    return math.exp(expo + jpdf_log_normalizer(kind, beta))


# --------------------------------------------------------------- densities


@lru_cache(maxsize=64)
def _log_j_table(nu: float, count: int) -> tuple[float, ...]:
    """ln J_{nu+k}, k < count, by the ratio recurrence re-anchored by quadrature."""
    def anchor(mu: float) -> float:
        return math.lgamma(mu) + 0.25 + specfun.pcf_d(-mu, 1.0).log_value

    out = [anchor(nu)]
    q = math.exp(anchor(nu + 1) - out[0])  # J_{mu+1} / J_mu
    for k in range(1, count):
        mu = nu + k
        if k % _ANCHOR_EVERY == 0:
            out.append(anchor(mu))
            q = math.exp(anchor(mu + 1) - out[-1])
            continue
        out.append(out[-1] + math.log(q))
        q = (mu - 1) / q - 1.0  # from J_{m+2} = m J_m - J_{m+1} with m = mu - 1
    return tuple(out)


@dataclass
class N2Density:
    """One-point density of a 2x2 ensemble, with its normalization constant."""

    kind: EnsembleKind
    beta: float
    log_norm: float  # ln of the constant dividing the unnormalized form
    _jcount: int = field(default=256, repr=False)

    def log_value(self, r: float) -> float:
        x = r * r
        a = self.beta / 2 + 1
        if self.kind is EnsembleKind.S:
            f = specfun.hyp1f1(a, 1.0, 0.5 * x)
            return -x + f.log_value - self.log_norm
        if self.kind is EnsembleKind.T:
            f = specfun.hyp2f2(a, a, 1.0, a + 0.5, 0.5 * x)
            return -x + f.log_value - self.log_norm
        return -x + self._ttilde_log_series(x) - self.log_norm

    def _ttilde_log_series(self, x: float) -> float:
        nu = self.beta / 2 + 1
        if x == 0.0:
            return _log_j_table(nu, 1)[0]
        lx = math.log(x)
        while True:
            lj = _log_j_table(nu, self._jcount)
            logs = []
            for k in range(self._jcount - 1):
                lt = k * lx + lj[k] - 2 * math.lgamma(k + 1)
                logs.append(lt)
                ratio = math.exp((k + 1) * lx + lj[k + 1] - 2 * math.lgamma(k + 2) - lt)
                if ratio < 0.5 and k > 2:
                    top = max(logs)
                    total = sum(math.exp(v - top) for v in logs)
                    # term ratios keep falling, so the tail is bounded by a geometric series
                    tail = math.exp(lt - top) * ratio / (1 - ratio)
                    if tail < TAIL_RTOL * 1e-2 * total:
                        return top + math.log(total)
            if self._jcount >= specfun.TERM_BUDGET:
                raise SpecFunAccuracyError(f"T~ series needs more than {self._jcount} terms at |lambda|^2 = {x}")
            self._jcount *= 2

    def __call__(self, lam: complex | NDArray) -> float | NDArray[np.float64]:
        r = np.abs(np.asarray(lam))
        if r.ndim == 0:
            return math.exp(self.log_value(float(r)))
        return np.array([math.exp(self.log_value(float(v))) for v in r.ravel()]).reshape(r.shape)

    def radial_pdf(self, r: float) -> float:
        """Density of |lambda|: 2 pi r rho(r)."""
        return 2 * math.pi * r * math.exp(self.log_value(r)) if r > 0 else 0.0

    def support_hint(self) -> float:
        """Radius beyond which the radial mass is negligible."""
        hi = 2.0 + 2.0 * math.sqrt(self.beta + 2)
        return hi

    def total_mass(self) -> float:
        val, _ = integrate.quad(self.radial_pdf, 0.0, self.support_hint(), epsabs=1e-13, epsrel=1e-11, limit=400)
        return val

    def radial_cdf(self, radii: NDArray[np.float64]) -> NDArray[np.float64]:
        """P(|lambda| <= r) by piecewise quadrature over the sorted radii."""
        radii = np.asarray(radii, dtype=float)
        order = np.argsort(radii)
        knots = np.linspace(0.0, max(float(radii.max()), 1e-12), 801)
        pdf = np.array([self.radial_pdf(v) for v in knots])
        # trapezoid on 800 panels: error far below the KS resolution
        cum = np.concatenate(([0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(knots))))
        out = np.empty_like(radii)
        out[order] = np.interp(radii[order], knots, cum)
        return np.minimum(out, 1.0)

    def radial_cdf_quad(self, r: float) -> float:
        val, _ = integrate.quad(self.radial_pdf, 0.0, r, epsabs=1e-13, epsrel=1e-11, limit=400)
        return val


def n2_density(kind: EnsembleKind | str, beta: float) -> N2Density:
    """The normalized n = 2 density for one ensemble."""
    kind = EnsembleKind.parse(kind)
    _check_beta(beta)
    a = beta / 2 + 1
    if kind is EnsembleKind.S:
        log_norm = math.log(math.pi) + a * math.log(2)
    elif kind is EnsembleKind.T:
        log_norm = math.log(math.pi) + specfun.hyp2f1(a, a, a + 0.5, 0.5).log_value
    elif kind is EnsembleKind.TTILDE:
        log_norm = math.log(math.pi) + (a / 2 - 1) * math.log(2) + math.lgamma(a / 2)
    else:
        raise ValueError("n = 2 formulas exist for T, S and Ttilde")
    return N2Density(kind, float(beta), log_norm)


def density_n2(kind: EnsembleKind | str, lam: complex, beta: float) -> float:
    return float(n2_density(kind, beta)(lam))


def ttilde_density_oracle(lam: complex, beta: float) -> float:
    """rho_T~ from its defining radial integral, independent of the series."""
    nu = beta / 2 + 1
    r = abs(lam)
    tpk = 0.5 * (-1 + math.sqrt(1 + 4 * (nu - 1 + r)))  # rough peak of the integrand

    def logf(t: float) -> float:
        z = 2 * r * math.sqrt(t)
        return (nu - 1) * math.log(t) - 0.5 * t * t - t + math.log(special.i0e(z)) + z

    shift = logf(max(tpk, 1e-3))
    val, _ = integrate.quad(lambda t: math.exp(logf(t) - shift) if t > 0 else 0.0, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=400, points=None)
    log_j0 = (nu / 2 - 1) * math.log(2) + math.lgamma(nu / 2)
    return math.exp(-r * r + shift + math.log(val) - math.log(math.pi) - log_j0)


# ------------------------------------------------------------ Monte Carlo


@dataclass(frozen=True)
class N2Report:
    kind: str
    beta: float
    m: int
    d: float
    moduli: NDArray[np.float64] = field(repr=False)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "beta": self.beta, "m": self.m, "d": self.d}


def sample_moduli_n2(kind: EnsembleKind | str, beta: float, m: int, seed: int, workers: int | None = None, chunk: int = 5000) -> NDArray[np.float64]:
    """|eigenvalues| of m unscaled 2x2 draws, by the quadratic formula."""
    kind = EnsembleKind.parse(kind)

    def block(c: int) -> NDArray[np.float64]:
        lo, hi = c * chunk, min(m, (c + 1) * chunk)
        out = np.empty(2 * (hi - lo))
        for i, j in enumerate(range(lo, hi)):
            t = sample(kind, 2, beta, RngStream(seed, j))
            tr = t.diag[0] + t.diag[1]
            det = t.diag[0] * t.diag[1] - t.sub[0] * t.sup[0]
            disc = np.sqrt(tr * tr / 4 - det)
            out[2 * i] = abs(tr / 2 + disc)
            out[2 * i + 1] = abs(tr / 2 - disc)
        return out

    nchunks = (m + chunk - 1) // chunk
    return np.concatenate(pmap(block, range(nchunks), workers))


def mc_validate_n2(kind: EnsembleKind | str, beta: float, m: int, seed: int, workers: int | None = None) -> N2Report:
    """KS distance between sampled moduli and the radial CDF of the n = 2 density."""
    if m < 1:
        raise ValueError("m must be positive")
    kind = EnsembleKind.parse(kind)
    r = sample_moduli_n2(kind, beta, m, seed, workers)
    dens = n2_density(kind, beta)
    d = ks_distance(EmpiricalCDF.from_samples(r), dens.radial_cdf)
    return N2Report(kind.value, float(beta), m, d, r)
