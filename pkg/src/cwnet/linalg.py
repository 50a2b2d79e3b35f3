"""Dense Hermitian eigendecomposition and spectral helpers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DimensionMismatch, NotHermitian, NumericalFailure

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues sorted descending; ``eigenvectors[:, i]`` pairs with ``eigenvalues[i]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def _check_hermitian(m) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    m = m.astype(complex)
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    if float(np.max(np.abs(m - m.conj().T), initial=0.0)) > HERMITIAN_TOL * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    return 0.5 * (m + m.conj().T)


def _normalize_phases(u: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(u), axis=0)
    lead = u[idx, np.arange(u.shape[1])]
    rot = np.where(np.abs(lead) > 0, np.conj(lead) / np.abs(lead), 1.0)
    return u * rot[None, :]


def hermitian_eig(m) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Householder reduction to a real symmetric tridiagonal matrix followed by
    implicit-shift QL. Eigenvector columns have unit norm and are rotated so
    their largest-magnitude entry is real and positive.

    Raises
    ------
    NotHermitian
        If ``m`` differs from its conjugate transpose by more than ``1e-10``
        relative to its largest entry.
    NumericalFailure
        If QL does not converge within ``30 * n`` iterations.
    """
    a = _check_hermitian(m)
    n = a.shape[0]
    if n == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0), dtype=complex))
    d, e, zt = _backend.householder_tridiagonal(a)
    d = np.ascontiguousarray(d, dtype=float)
    e = np.ascontiguousarray(e, dtype=float)
    zt = np.ascontiguousarray(zt, dtype=complex)
    if _backend.tql_implicit(d, e, zt, 30 * n) < 0:
        raise NumericalFailure(f"QL iteration did not converge within {30 * n} steps")
    order = np.argsort(-d, kind="stable")
    vals = d[order]
    vecs = _normalize_phases(zt[order].T)
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return EigenDecomposition(vals, vecs)


def eigvalsh(m) -> np.ndarray:
    """Eigenvalues only, descending."""
    return hermitian_eig(m).eigenvalues


def spectral_radius(m) -> float:
    vals = eigvalsh(m)
    if vals.size == 0:
        return 0.0
    return float(max(abs(vals[0]), abs(vals[-1])))


def evolve_left(p, x0, t: int) -> np.ndarray:
    """Row-vector evolution ``x(t)^T = x(0)^T P^t`` by ``t`` vector-matrix products."""
    p = np.asarray(p)
    x = np.asarray(x0, dtype=complex)
    if p.ndim != 2 or p.shape[0] != p.shape[1] or x.shape != (p.shape[0],):
        raise DimensionMismatch(f"operator {p.shape} incompatible with state {x.shape}")
    if t < 0:
        raise DimensionMismatch("t must be nonnegative")
    x = x.copy()
    for _ in range(int(t)):
        x = x @ p
    return x
