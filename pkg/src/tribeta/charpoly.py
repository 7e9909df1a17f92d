"""Characteristic polynomials of tridiagonal matrices.

For a centred matrix (zero diagonal) det(z - M) depends on the products
b~_j = b_j c_j only and has the parity of n:

    P_n(z) = z^n + kappa_1 z^{n-2} + kappa_2 z^{n-4} + ...

Three independent routes give the kappa_l: the three-term recurrence, a
dynamic programme over the nested sums, and brute-force enumeration of
non-adjacent index subsets.  Variance identities use exact integers and
fractions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numba
import numpy as np
from numpy.typing import ArrayLike, NDArray

from .ensembles import TridiagMatrix

SUBSET_ORACLE_MAX_N = 24


@dataclass(frozen=True)
class CharPolyCoeffs:
    n: int
    kappa: NDArray[np.complex128]  # kappa[l-1] multiplies z^{n-2l}

    def coefficient(self, ell: int) -> complex:
        if ell == 0:
            return 1.0 + 0j
        if 1 <= ell <= self.kappa.size:
            return complex(self.kappa[ell - 1])
        return 0j

    def descending(self) -> NDArray[np.complex128]:
        """Dense coefficients, highest power first (numpy.polyval order)."""
        out = np.zeros(self.n + 1, dtype=complex)
        out[0] = 1.0
        for ell in range(1, self.kappa.size + 1):
            out[2 * ell] = self.kappa[ell - 1]
        return out

    def __call__(self, z: ArrayLike) -> NDArray[np.complex128]:
        return np.polyval(self.descending(), np.asarray(z, dtype=complex))


@dataclass(frozen=True)
class RealPolynomial:
    """Exact polynomial, coefficients ascending in the power of x."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        c = [Fraction(v) for v in self.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def exact(self, x: Fraction | int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def _as_btilde(btilde: ArrayLike) -> NDArray[np.complex128]:
    return np.asarray(btilde, dtype=complex).ravel()


def coeffs_recurrence(btilde: ArrayLike) -> CharPolyCoeffs:
    """kappa via P_{k+1} = z P_k - b~_k P_{k-1}, tracked on coefficients."""
    bt = _as_btilde(btilde)
    n = bt.size + 1
    prev = np.array([1.0 + 0j])  # kappa_0..: P_0
    cur = np.array([1.0 + 0j])  # P_1 = z
    for k in range(1, n):
        m = (k + 1) // 2 + 1
        nxt = np.zeros(m, dtype=complex)
        nxt[: cur.size] = cur
        nxt[1 : prev.size + 1] -= bt[k - 1] * prev
        prev, cur = cur, nxt
    return CharPolyCoeffs(n, cur[1:].copy())


def coeffs_nested_sum(btilde: ArrayLike) -> CharPolyCoeffs:
    """kappa_l = (-1)^l sum_{g1} b~_{g1} sum_{g2 <= g1-2} b~_{g2} ... .

    Level m keeps prefix sums S_m(g) over the innermost m sums, with
    S_m(g) = sum_{h <= g} b~_h S_{m-1}(h - 2).
    """
    bt = _as_btilde(btilde)
    n = bt.size + 1
    half = n // 2
    # index 0 stands for g = -1, index 1 for g = 0, index g + 1 for g >= 1
    prev_level = np.ones(n + 1, dtype=complex)
    kappa = np.zeros(half, dtype=complex)
    for ell in range(1, half + 1):
        level = np.zeros(n + 1, dtype=complex)
        running = 0j
        for g in range(1, n):
            running += bt[g - 1] * prev_level[g - 1]
            level[g + 1] = running
        kappa[ell - 1] = (-1) ** ell * level[n]
        prev_level = level
    return CharPolyCoeffs(n, kappa)


def coeffs_subset_oracle(btilde: ArrayLike) -> CharPolyCoeffs:
    """Sum over every set of pairwise non-adjacent indices (exponential cost)."""
    bt = _as_btilde(btilde)
    n = bt.size + 1
    if n > SUBSET_ORACLE_MAX_N:
        raise ValueError(f"subset enumeration limited to n <= {SUBSET_ORACLE_MAX_N}")
    kappa = np.zeros(n // 2, dtype=complex)
    for ell in range(1, n // 2 + 1):
        total = 0j
        for idx in itertools.combinations(range(n - 1), ell):
            if all(idx[i + 1] - idx[i] >= 2 for i in range(ell - 1)):
                total += np.prod(bt[list(idx)])
        kappa[ell - 1] = (-1) ** ell * total
    return CharPolyCoeffs(n, kappa)


# ------------------------------------------------- scaled recurrence kernels

_BIG = 2.0**400
_SMALL = 2.0**-400


@numba.njit(cache=True, nogil=True)
def _scaled_eval(a: np.ndarray, bt: np.ndarray, z: complex) -> tuple[complex, complex, int]:
    """(mantissa of P, mantissa of P', power-of-two exponent) at z.

    a holds a_1..a_n and bt holds b~_1..b~_{n-1}.
    """
    n = a.size
    p0 = 1.0 + 0j
    p1 = z - a[0]
    d0 = 0j
    d1 = 1.0 + 0j
    e = 0
    for k in range(1, n):
        w = z - a[k]
        p2 = w * p1 - bt[k - 1] * p0
        d2 = p1 + w * d1 - bt[k - 1] * d0
        p0, p1, d0, d1 = p1, p2, d1, d2
        m = max(abs(p1.real) + abs(p1.imag), abs(p0.real) + abs(p0.imag))
        if m > _BIG:
            p0 *= _SMALL
            p1 *= _SMALL
            d0 *= _SMALL
            d1 *= _SMALL
            e += 400
        elif 0.0 < m < _SMALL:
            p0 *= _BIG
            p1 *= _BIG
            d0 *= _BIG
            d1 *= _BIG
            e -= 400
    return p1, d1, e


@numba.njit(cache=True, nogil=True)
def _scaled_eval_many(a: np.ndarray, bt: np.ndarray, zs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m = zs.size
    p = np.empty(m, dtype=np.complex128)
    d = np.empty(m, dtype=np.complex128)
    e = np.empty(m, dtype=np.int64)
    for i in range(m):
        p[i], d[i], e[i] = _scaled_eval(a, bt, zs[i])
    return p, d, e


def _recurrence_data(m: TridiagMatrix) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    return np.ascontiguousarray(m.a_indexed()), np.ascontiguousarray(m.btilde())


def eval_charpoly_scaled(m: TridiagMatrix, z: ArrayLike) -> tuple[NDArray[np.complex128], NDArray[np.int64]]:
    """det(z - M) as mantissa * 2**exponent."""
    a, bt = _recurrence_data(m)
    zs = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    p, _, e = _scaled_eval_many(a, bt, zs)
    return p, e


def eval_charpoly(m: TridiagMatrix, z: ArrayLike) -> NDArray[np.complex128] | complex:
    """det(z - M); overflows to inf only if the true value does."""
    zs = np.asarray(z, dtype=complex)
    p, e = eval_charpoly_scaled(m, zs)
    with np.errstate(over="ignore"):
        out = np.ldexp(p.real, e) + 1j * np.ldexp(p.imag, e)
    return complex(out[0]) if zs.ndim == 0 else out.reshape(zs.shape)


def log_derivative(m: TridiagMatrix, z: ArrayLike) -> NDArray[np.complex128]:
    """P'(z)/P(z) from the same scaled recurrence."""
    a, bt = _recurrence_data(m)
    zs = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    p, d, _ = _scaled_eval_many(a, bt, zs)
    return d / p


def leading_minors(m: TridiagMatrix, z: complex) -> NDArray[np.complex128]:
    """(P_0(z), ..., P_n(z)) for the bottom-right k x k blocks (unscaled)."""
    a, bt = _recurrence_data(m)
    out = np.empty(m.n + 1, dtype=complex)
    out[0] = 1.0
    out[1] = z - a[0]
    for k in range(1, m.n):
        out[k + 1] = (z - a[k]) * out[k] - bt[k - 1] * out[k - 1]
    return out


# ----------------------------------------------------- variance identities


def _nested_sums(weights: Sequence[Fraction | int], n: int) -> list:
    """l-fold nested sums sum_{g1<=n-1} w_{g1} sum_{g2<=g1-2} w_{g2} ..."""
    prev = [1] * (n + 1)
    out = []
    for _ in range(1, n // 2 + 1):
        level = [0] * (n + 1)
        running = 0
        for g in range(1, n):
            running += weights[g - 1] * prev[g - 1]
            level[g + 1] = running
        out.append(level[n])
        prev = level
    return out


def var_kappa_D(n: int) -> list[int]:
    """Var kappa_l for b~_j = j e^{i phi}: nested sums of squares, exact."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return _nested_sums([g * g for g in range(1, n)], n)


@dataclass(frozen=True)
class VarianceIdentity:
    nested: tuple[Fraction, ...]
    closed: tuple[Fraction, ...]

    @property
    def agree(self) -> bool:
        return self.nested == self.closed


def var_kappa_G(n: int, beta: float | Fraction) -> VarianceIdentity:
    """Var kappa_l for |b~_j| = sqrt(j/beta), nested and factorial forms.

    beta is converted exactly to a Fraction, so the comparison is exact.
    """
    if n < 2 or not beta > 0:
        raise ValueError("need n >= 2 and beta > 0")
    b = Fraction(beta)
    raw = _nested_sums(list(range(1, n)), n)
    nested = tuple(Fraction(v) / b**ell for ell, v in enumerate(raw, start=1))
    closed = tuple(
        Fraction(math.factorial(n), 2**ell * math.factorial(ell) * math.factorial(n - 2 * ell)) / b**ell
        for ell in range(1, n // 2 + 1)
    )
    return VarianceIdentity(nested, closed)


def q_poly_D(n: int) -> RealPolynomial:
    """Q_{k+1} = x Q_k + k^2 Q_{k-1}, Q_0 = 1, Q_1 = x."""
    if n < 0:
        raise ValueError("n must be non-negative")
    q0: list[Fraction] = [Fraction(1)]
    if n == 0:
        return RealPolynomial(tuple(q0))
    q1: list[Fraction] = [Fraction(0), Fraction(1)]
    for k in range(1, n):
        q2 = [Fraction(0)] + q1
        for i, c in enumerate(q0):
            q2[i] += k * k * c
        q0, q1 = q1, q2
    return RealPolynomial(tuple(q1))


def q_poly_D_closed(n: int, x: float | Fraction) -> float:
    """sum_k (-1)^{n-k} (n!)^2 2^k / ((k!)^2 (n-k)!) ((1+x)/2)_k.

    The alternating sum is carried out in exact rational arithmetic and
    rounded once at the end.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    h = (1 + Fraction(x)) / 2
    total = Fraction(0)
    poch = Fraction(1)
    nf = math.factorial(n)
    for k in range(n + 1):
        if k:
            poch *= h + k - 1
        total += (-1) ** (n - k) * Fraction(nf * nf * 2**k, math.factorial(k) ** 2 * math.factorial(n - k)) * poch
    return float(total)


@dataclass(frozen=True)
class QPolyG:
    recurrence: RealPolynomial
    closed: RealPolynomial

    @property
    def agree(self) -> bool:
        return self.recurrence == self.closed


def q_poly_G(n: int, beta: float | Fraction) -> QPolyG:
    """Q_{k+1} = x Q_k + (k/beta) Q_{k-1} and sum_j n!/(j!(n-2j)!(2 beta)^j) x^{n-2j}."""
    if n < 0 or not beta > 0:
        raise ValueError("need n >= 0 and beta > 0")
    b = Fraction(beta)
    q0: list[Fraction] = [Fraction(1)]
    q1: list[Fraction] = [Fraction(0), Fraction(1)]
    if n == 0:
        rec = q0
    else:
        for k in range(1, n):
            q2 = [Fraction(0)] + q1
            for i, c in enumerate(q0):
                q2[i] += Fraction(k) / b * c
            q0, q1 = q1, q2
        rec = q1
    closed = [Fraction(0)] * (n + 1)
    for j in range(n // 2 + 1):
        closed[n - 2 * j] = Fraction(math.factorial(n), math.factorial(j) * math.factorial(n - 2 * j)) / (2 * b) ** j
    return QPolyG(RealPolynomial(tuple(rec)), RealPolynomial(tuple(closed)))
