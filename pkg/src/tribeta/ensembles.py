"""Tridiagonal random matrices T, S, T~ and the low-temperature limits D, G.

Storage follows the reversed indexing of the ensembles: the top-left
diagonal entry is a_n and the bottom-right one is a_1, while ``sub[i]`` and
``sup[i]`` hold b_{n-1-i} and c_{n-1-i}.  So b_1, c_1 sit in the last row and
column.  The helpers ``a_indexed`` and ``btilde`` return sequences ordered
by the ensemble index j = 1, 2, ....

D and G carry an extra factor sqrt(2) relative to the usual
low-temperature limit matrices: ``sample_D`` has |sub[j]| = sqrt(j), and the
eigenvalue limit of T/sqrt(2 n beta) is lambda(D)/(2 sqrt(n)).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import NDArray

from . import randsrc
from .randsrc import RngStream


class EnsembleKind(str, enum.Enum):
    T = "T"
    S = "S"
    TTILDE = "Ttilde"
    D = "D"
    G = "G"

    @classmethod
    def parse(cls, value: "str | EnsembleKind") -> "EnsembleKind":
        if isinstance(value, cls):
            return value
        for k in cls:
            if k.value.lower() == str(value).lower():
                return k
        raise ValueError(f"unknown ensemble kind {value!r}")


class SingularTransformError(ValueError):
    """A zero super-diagonal entry blocks the diagonal similarity."""


@dataclass(frozen=True)
class TridiagMatrix:
    diag: NDArray[np.complex128]
    sub: NDArray[np.complex128]
    sup: NDArray[np.complex128]

    def __post_init__(self) -> None:
        for name in ("diag", "sub", "sup"):
            object.__setattr__(self, name, np.ascontiguousarray(getattr(self, name), dtype=np.complex128))
        n = self.diag.size
        if n < 1 or self.sub.size != n - 1 or self.sup.size != n - 1:
            raise ValueError("inconsistent tridiagonal lengths")

    @property
    def n(self) -> int:
        return self.diag.size

    def a_indexed(self) -> NDArray[np.complex128]:
        """(a_1, ..., a_n)."""
        return self.diag[::-1].copy()

    def b_indexed(self) -> NDArray[np.complex128]:
        """(b_1, ..., b_{n-1})."""
        return self.sub[::-1].copy()

    def c_indexed(self) -> NDArray[np.complex128]:
        """(c_1, ..., c_{n-1})."""
        return self.sup[::-1].copy()

    def btilde(self) -> NDArray[np.complex128]:
        """(b~_1, ..., b~_{n-1}) with b~_j = b_j c_j."""
        return (self.sub * self.sup)[::-1].copy()

    def to_dense(self) -> NDArray[np.complex128]:
        m = np.diag(self.diag)
        if self.n > 1:
            m += np.diag(self.sub, -1) + np.diag(self.sup, 1)
        return m

    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.diag) ** 2) + np.sum(np.abs(self.sub) ** 2) + np.sum(np.abs(self.sup) ** 2)))

    def matvec(self, x: NDArray[np.complex128]) -> NDArray[np.complex128]:
        y = self.diag * x
        if self.n > 1:
            y[1:] += self.sub * x[:-1]
            y[:-1] += self.sup * x[1:]
        return y

    def transpose(self) -> "TridiagMatrix":
        return TridiagMatrix(self.diag, self.sup, self.sub)

    def symmetrized(self) -> "TridiagMatrix":
        """Diagonally similar complex-symmetric form with sub = sup = sqrt(b c)."""
        root = np.sqrt(self.sub * self.sup)
        return TridiagMatrix(self.diag, root, root.copy())


def scale(m: TridiagMatrix, gamma: float) -> TridiagMatrix:
    if not gamma > 0:
        raise ValueError("scale factor must be positive")
    return TridiagMatrix(m.diag * gamma, m.sub * gamma, m.sup * gamma)


def scaling_factor(n: int, beta: float) -> float:
    """1/sqrt(2 n beta), the factor that makes the spectrum O(1)."""
    return 1.0 / np.sqrt(2.0 * n * beta)


def balance_to_btilde(m: TridiagMatrix) -> TridiagMatrix:
    """Similar matrix with unit super-diagonal and sub-diagonal b_j c_j."""
    if np.any(m.sup == 0):
        raise SingularTransformError("super-diagonal has a zero entry")
    return TridiagMatrix(m.diag, m.sub * m.sup, np.ones(m.n - 1, dtype=complex))


def _dof_index(n: int) -> NDArray[np.float64]:
    # ensemble index j of sub[i] / sup[i]
    return np.arange(n - 1, 0, -1, dtype=float)


def _check(n: int, beta: float | None = None) -> None:
    if n < 2:
        raise ValueError("n must be at least 2")
    if beta is not None and not beta > 0:
        raise ValueError("beta must be positive")


def sample_T(n: int, beta: float, s: RngStream) -> TridiagMatrix:
    _check(n, beta)
    a = randsrc.complex_normal(s, n)
    th = randsrc.uniform_phase(s, n - 1)
    ph = randsrc.uniform_phase(s, n - 1)
    k = 0.5 * beta * _dof_index(n)
    b = randsrc.chi(s, k) * np.exp(1j * th)
    c = randsrc.chi(s, k) * np.exp(1j * ph)
    return TridiagMatrix(a, b, c)


def sample_S(n: int, beta: float, s: RngStream) -> TridiagMatrix:
    _check(n, beta)
    a = randsrc.complex_normal(s, n)
    th = randsrc.uniform_phase(s, n - 1)
    c = randsrc.chi(s, beta * _dof_index(n)) / np.sqrt(2.0) * np.exp(1j * th)
    return TridiagMatrix(a, c, c.copy())


def sample_Ttilde(n: int, beta: float, s: RngStream) -> TridiagMatrix:
    _check(n, beta)
    a = randsrc.complex_normal(s, n)
    th = randsrc.uniform_phase(s, n - 1)
    bt = randsrc.chi(s, beta * _dof_index(n)) * np.exp(1j * th)
    return TridiagMatrix(a, bt, np.ones(n - 1, dtype=complex))


def sample_D(n: int, s: RngStream) -> TridiagMatrix:
    _check(n)
    th = randsrc.uniform_phase(s, n - 1)
    ph = randsrc.uniform_phase(s, n - 1)
    r = np.sqrt(_dof_index(n))
    return TridiagMatrix(np.zeros(n, dtype=complex), r * np.exp(1j * th), r * np.exp(1j * ph))


def sample_G(n: int, beta: float, s: RngStream) -> TridiagMatrix:
    _check(n, beta)
    th = randsrc.uniform_phase(s, n - 1)
    sub = np.sqrt(_dof_index(n)) * np.exp(1j * th)
    return TridiagMatrix(np.zeros(n, dtype=complex), sub, np.full(n - 1, 1.0 / np.sqrt(beta), dtype=complex))


def sample(kind: EnsembleKind | str, n: int, beta: float, s: RngStream) -> TridiagMatrix:
    kind = EnsembleKind.parse(kind)
    if kind is EnsembleKind.T:
        return sample_T(n, beta, s)
    if kind is EnsembleKind.S:
        return sample_S(n, beta, s)
    if kind is EnsembleKind.TTILDE:
        return sample_Ttilde(n, beta, s)
    if kind is EnsembleKind.D:
        return sample_D(n, s)
    return sample_G(n, beta, s)


def sample_scaled(kind: EnsembleKind | str, n: int, beta: float, s: RngStream) -> TridiagMatrix:
    """Sample and apply 1/sqrt(2 n beta)."""
    return scale(sample(kind, n, beta, s), scaling_factor(n, beta))


def sample_ginibre(n: int, s: RngStream) -> NDArray[np.complex128]:
    """Dense complex Ginibre matrix scaled so its spectrum fills the unit disc."""
    g = s.generator
    re = g.standard_normal((n, n))
    im = g.standard_normal((n, n))
    return (re + 1j * im) / np.sqrt(2.0 * n)


# ------------------------------------------------------------------- CSV


def write_matrix_csv(m: TridiagMatrix, path: str | Path, header: dict[str, Any]) -> None:
    """Nonzero pattern as rows (row, col, re, im) after a '# {json}' line."""
    dense_idx = [(i, i, m.diag[i]) for i in range(m.n)]
    dense_idx += [(i + 1, i, m.sub[i]) for i in range(m.n - 1)]
    dense_idx += [(i, i + 1, m.sup[i]) for i in range(m.n - 1)]
    dense_idx.sort(key=lambda t: (t[0], t[1]))
    meta = dict(header, n=m.n)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        fh.write("row,col,re,im\n")
        for i, j, v in dense_idx:
            fh.write(f"{i},{j},{float(v.real)!r},{float(v.imag)!r}\n")


def read_matrix_csv(path: str | Path) -> tuple[TridiagMatrix, dict[str, Any]]:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError("missing JSON header line")
        meta = json.loads(first[1:])
        if fh.readline().strip() != "row,col,re,im":
            raise ValueError("unexpected column header")
        n = int(meta["n"])
        diag = np.zeros(n, dtype=complex)
        sub = np.zeros(max(n - 1, 0), dtype=complex)
        sup = np.zeros(max(n - 1, 0), dtype=complex)
        for line in fh:
            if not line.strip():
                continue
            i_s, j_s, re_s, im_s = line.strip().split(",")
            i, j, v = int(i_s), int(j_s), complex(float(re_s), float(im_s))
            if i == j:
                diag[i] = v
            elif i == j + 1:
                sub[j] = v
            elif j == i + 1:
                sup[i] = v
            else:
                raise ValueError(f"entry ({i},{j}) is off the tridiagonal band")
    return TridiagMatrix(diag, sub, sup), meta
