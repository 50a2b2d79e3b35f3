"""Structural balance and antibalance of complex-weighted graphs.

Three independent classifiers are provided: node potentials over a BFS
spanning tree, the extreme eigenvalues of ``P_h``, and literal simple-cycle
enumeration for small graphs. They must agree.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import Disconnected, InvalidParameter, NotInClass, TooLarge
from .graph import (PHASE_TOL, ComplexGraph, bfs_tree, circular_distance,
                    hermitian_similar_transition, with_phases, wrap_phase)
from .linalg import eigvalsh

SPECTRAL_TOL = 1e-8
BRUTE_FORCE_MAX_N = 12


class BalanceClass(str, enum.Enum):
    BALANCED = "Balanced"
    ANTIBALANCED = "Antibalanced"
    BOTH = "BalancedAndAntibalanced"
    STRICTLY_UNBALANCED = "StrictlyUnbalanced"

    @classmethod
    def from_flags(cls, balanced: bool, antibalanced: bool) -> "BalanceClass":
        if balanced and antibalanced:
            return cls.BOTH
        if balanced:
            return cls.BALANCED
        if antibalanced:
            return cls.ANTIBALANCED
        return cls.STRICTLY_UNBALANCED


class Mode(str, enum.Enum):
    BALANCED = "balanced"
    ANTIBALANCED = "antibalanced"


@dataclass(frozen=True)
class BalanceReport:
    balanced: bool
    antibalanced: bool
    balance_class: BalanceClass
    dissimilarity_to_balance: float
    dissimilarity_to_antibalance: float
    method: str = "tree"

    def to_dict(self) -> dict:
        return {
            "balanced": self.balanced,
            "antibalanced": self.antibalanced,
            "class": self.balance_class.value,
            "dissimilarity_to_balance": self.dissimilarity_to_balance,
            "dissimilarity_to_antibalance": self.dissimilarity_to_antibalance,
            "method": self.method,
        }


@dataclass(frozen=True, eq=False)
class BalancePartition:
    """``subset_of[i]`` is the subset of node ``i``; ``subset_phase[0] == 0``."""

    subset_of: np.ndarray
    subset_phase: np.ndarray
    mode: Mode

    @property
    def n_subsets(self) -> int:
        return len(self.subset_phase)

    def node_phases(self) -> np.ndarray:
        return self.subset_phase[self.subset_of]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "subset_of": [int(s) for s in self.subset_of],
            "subset_phase": [float(t) for t in self.subset_phase],
        }


def _require_connected(g: ComplexGraph) -> None:
    if not g.is_connected:
        raise Disconnected("balance is defined here for connected graphs only")


def potentials(g: ComplexGraph, shift: float = 0.0, root: int = 0) -> np.ndarray:
    """Node potentials ``psi`` along a BFS tree: ``psi[j] = psi[i] + phi_ij + shift``."""
    order, parent, _ = bfs_tree(g, root)
    psi = np.zeros(g.n)
    for v in order[1:]:
        u = parent[v]
        psi[v] = wrap_phase(psi[u] + g.phase[u, v] + shift)
    return psi


def _consistent(g: ComplexGraph, psi: np.ndarray, shift: float, tol: float) -> bool:
    for i, j, _, phi in g.edges():
        if circular_distance(phi + shift, psi[j] - psi[i]) > tol:
            return False
    return True


def dissimilarities(g: ComplexGraph) -> tuple[float, float]:
    """``(1 - lambda_1, 1 + lambda_n)`` of ``P_h``, clipped at 0."""
    vals = eigvalsh(hermitian_similar_transition(g))
    return max(0.0, 1.0 - float(vals[0])), max(0.0, 1.0 + float(vals[-1]))


def _report(g, balanced, antibalanced, method) -> BalanceReport:
    db, da = dissimilarities(g)
    return BalanceReport(bool(balanced), bool(antibalanced),
                         BalanceClass.from_flags(balanced, antibalanced), db, da, method)


def tree_flags(g: ComplexGraph, tol: float = PHASE_TOL) -> tuple[bool, bool]:
    _require_connected(g)
    bal = _consistent(g, potentials(g), 0.0, tol)
    anti = _consistent(g, potentials(g, np.pi), np.pi, tol)
    return bal, anti


def classify(g: ComplexGraph, tol: float = PHASE_TOL) -> BalanceReport:
    """Classify by checking every non-tree edge against BFS potentials.

    A graph is balanced when each edge phase equals the potential difference
    of its endpoints (mod ``2*pi``, within ``tol``), and antibalanced when the
    same holds after adding ``pi`` to every edge.
    """
    bal, anti = tree_flags(g, tol)
    return _report(g, bal, anti, "tree")


def classify_spectral(g: ComplexGraph, tol: float = SPECTRAL_TOL) -> BalanceReport:
    """Classify from the extreme eigenvalues of ``P_h``.

    Balanced iff ``lambda_1 = 1`` and antibalanced iff ``lambda_n = -1``, both
    within ``tol``.
    """
    _require_connected(g)
    db, da = dissimilarities(g)
    bal, anti = db <= tol, da <= tol
    return BalanceReport(bal, anti, BalanceClass.from_flags(bal, anti), db, da, "spectral")


def brute_force_classify(g: ComplexGraph, tol: float = PHASE_TOL) -> BalanceReport:
    """Classify by enumerating every simple cycle (``n <= 12`` only)."""
    if g.n > BRUTE_FORCE_MAX_N:
        raise TooLarge(f"cycle enumeration limited to n <= {BRUTE_FORCE_MAX_N}, got {g.n}")
    _require_connected(g)
    adj = (g.magnitude > 0).astype(np.uint8)
    bal, anti, _ = _backend.cycle_flags(adj, np.ascontiguousarray(g.phase), tol)
    return _report(g, bal, anti, "brute")


def classify_with(g: ComplexGraph, method: str = "tree", tol: float | None = None) -> BalanceReport:
    if method == "tree":
        return classify(g, PHASE_TOL if tol is None else tol)
    if method == "spectral":
        return classify_spectral(g, SPECTRAL_TOL if tol is None else tol)
    if method == "brute":
        return brute_force_classify(g, PHASE_TOL if tol is None else tol)
    raise InvalidParameter(f"unknown method {method!r}")


def extract_partition(g: ComplexGraph, mode: Mode | str = Mode.BALANCED,
                      tol: float = PHASE_TOL) -> BalancePartition:
    """Node subsets of equal potential and their phases.

    In balanced mode every edge satisfies
    ``phi_ij = theta[s(j)] - theta[s(i)]``; in antibalanced mode the same holds
    for ``phi_ij + pi``. Subsets are numbered in BFS order from node 0.

    Raises
    ------
    NotInClass
        If the graph is not balanced (or antibalanced) as requested.
    """
    mode = Mode(mode)
    shift = np.pi if mode is Mode.ANTIBALANCED else 0.0
    _require_connected(g)
    psi = potentials(g, shift)
    if not _consistent(g, psi, shift, tol):
        raise NotInClass(f"graph is not {mode.value}")
    order, _, _ = bfs_tree(g, 0)
    phases: list[float] = []
    subset_of = np.full(g.n, -1, dtype=int)
    for v in order:
        for s, th in enumerate(phases):
            if circular_distance(psi[v], th) <= tol:
                subset_of[v] = s
                break
        else:
            subset_of[v] = len(phases)
            phases.append(float(psi[v]))
    return BalancePartition(subset_of, np.array(phases), mode)


def gauge_transform(g: ComplexGraph, psi) -> ComplexGraph:
    """``W'_ij = exp(-i psi_i) W_ij exp(i psi_j)``; magnitudes are unchanged."""
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (g.n,):
        raise InvalidParameter(f"psi must have length {g.n}")
    return with_phases(g, g.phase - psi[:, None] + psi[None, :])
