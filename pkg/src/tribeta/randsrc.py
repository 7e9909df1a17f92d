"""Seeded random variates with one independent stream per realization.

A stream is keyed by ``(base_seed, stream_index)`` through numpy's
``SeedSequence`` spawn keys feeding a counter-based Philox generator, so
realization ``j`` draws the same numbers no matter which worker runs it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

TWO_PI = 2.0 * np.pi


@dataclass(eq=False)
class RngStream:
    base_seed: int
    stream_index: int
    _gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not (0 <= self.base_seed < 2**64 and 0 <= self.stream_index < 2**64):
            raise ValueError("seed and stream index must be unsigned 64-bit integers")
        ss = np.random.SeedSequence(entropy=self.base_seed, spawn_key=(self.stream_index,))
        self._gen = np.random.Generator(np.random.Philox(ss))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen


def normal01(s: RngStream, size: int | tuple[int, ...] | None = None) -> float | NDArray[np.float64]:
    return s.generator.standard_normal(size)


def complex_normal(s: RngStream, size: int) -> NDArray[np.complex128]:
    """N(0,1) + i N(0,1), real parts drawn before imaginary parts."""
    re = s.generator.standard_normal(size)
    im = s.generator.standard_normal(size)
    return re + 1j * im


def uniform_phase(s: RngStream, size: int | tuple[int, ...] | None = None) -> float | NDArray[np.float64]:
    return TWO_PI * s.generator.random(size)


def uniform01(s: RngStream, size: int | tuple[int, ...] | None = None) -> float | NDArray[np.float64]:
    return s.generator.random(size)


def gamma_mt(s: RngStream, shape: ArrayLike) -> NDArray[np.float64]:
    """Unit-scale gamma variates by the Marsaglia-Tsang squeeze.

    Shapes below one are boosted: G(a) = G(a + 1) * U^{1/a}, evaluated in
    log space so tiny shapes never underflow to zero.
    """
    a = np.atleast_1d(np.asarray(shape, dtype=float))
    if np.any(~(a > 0)):
        raise ValueError("gamma shape must be positive")
    g = s.generator
    small = a < 1.0
    d = np.where(small, a + 1.0, a) - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty_like(a)
    pending = np.arange(a.size)
    while pending.size:
        x = g.standard_normal(pending.size)
        u = g.random(pending.size)
        v = (1.0 + c[pending] * x) ** 3
        ok = v > 0
        vs = np.where(ok, v, 1.0)
        dd = d[pending]
        accept = ok & (
            (u < 1.0 - 0.0331 * x**4)
            | (np.log(np.where(u > 0, u, 1e-300)) < 0.5 * x * x + dd * (1.0 - vs + np.log(vs)))
        )
        out[pending[accept]] = dd[accept] * vs[accept]
        pending = pending[~accept]
    if np.any(small):
        idx = np.flatnonzero(small)
        u = g.random(idx.size)
        log_g = np.log(out[idx]) + np.log(np.where(u > 0, u, 1e-300)) / a[idx]
        out[idx] = np.maximum(np.exp(log_g), np.finfo(float).tiny)
    return out.reshape(np.shape(shape))


def chi(s: RngStream, k: ArrayLike) -> NDArray[np.float64]:
    """chi_k variates as sqrt(2 Gamma(k/2, 1)); k may be any positive real."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(~(k_arr > 0)):
        raise ValueError("chi degrees of freedom must be positive")
    return np.sqrt(2.0 * gamma_mt(s, 0.5 * k_arr))
