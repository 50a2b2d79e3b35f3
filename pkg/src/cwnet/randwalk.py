"""Discrete-time random walks whose walkers pick up edge phases.

States are row vectors evolved as ``x(t+1)^T = x(t)^T P`` with ``P = D^{-1} W``:
a walker at ``i`` that crosses to ``j`` has its complex density multiplied by
``W_ij / d_i``, i.e. it adds the edge phase ``phi_ij``. They are stored as
plain 1-D arrays, so one step is ``x @ P``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .balance import Mode, extract_partition, tree_flags
from .errors import (Bipartite, DimensionMismatch, Disconnected,
                     InvalidParameter, NotInClass, PhaseGridViolation)
from .graph import (PHASE_TOL, TWO_PI, ComplexGraph, circular_distance,
                    hermitian_similar_transition, is_bipartite,
                    transition_matrix)
from .linalg import eigvalsh

UNIT_TOL = 1e-8
MAX_T_CAP = 10 ** 6
# two limits closer than this (in units of tol) are treated as one fixed point
ALT_SEPARATION = 3.0


@dataclass(frozen=True, eq=False)
class WalkerState:
    densities: np.ndarray
    time: int = 0


@dataclass(frozen=True, eq=False)
class PhaseClassState:
    """``densities[i, z]`` is the mass on node ``i`` carrying phase ``z * 2*pi / k``."""

    densities: np.ndarray
    time: int = 0

    @property
    def k(self) -> int:
        return self.densities.shape[1]

    def flatten(self) -> np.ndarray:
        """Lifted-space vector with entry ``z * n + i`` for ``(i, z)``."""
        return self.densities.T.reshape(-1).copy()

    @classmethod
    def from_flat(cls, y, n: int, time: int = 0) -> "PhaseClassState":
        y = np.asarray(y)
        return cls(y.reshape(-1, n).T.copy(), time)

    def marginal(self) -> np.ndarray:
        return self.densities.sum(axis=1)

    def phase_average(self) -> np.ndarray:
        z = np.exp(1j * TWO_PI * np.arange(self.k) / self.k)
        return self.densities @ z


class SteadyKind(str, enum.Enum):
    FIXED = "Fixed"
    ODD_EVEN = "OddEvenAlternating"
    ZERO = "Zero"


@dataclass(frozen=True, eq=False)
class SteadyStateReport:
    """Outcome of :func:`simulate_to_limit`.

    ``kind`` and ``converged_at`` are ``None`` when ``max_t`` was reached.
    ``fixed_points`` holds one vector (Fixed, Zero) or ``(odd, even)``.
    ``closed_form_error`` is the sup-norm gap to the closed-form limit(s)
    when one applies, else ``None``.
    """

    kind: Optional[SteadyKind]
    fixed_points: tuple
    converged_at: Optional[int]
    steps: int
    closed_form_error: Optional[float] = None
    expected_kind: Optional[SteadyKind] = None

    @property
    def converged(self) -> bool:
        return self.kind is not None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value if self.kind else "NotConverged",
            "converged_at": self.converged_at if self.converged else "NotConverged",
            "steps": self.steps,
            "fixed_points": [complex_vector_to_json(v) for v in self.fixed_points],
            "closed_form_error": self.closed_form_error,
            "expected_kind": self.expected_kind.value if self.expected_kind else None,
        }


def complex_vector_to_json(v) -> dict:
    v = np.asarray(v, dtype=complex)
    return {"re": v.real.tolist(), "im": v.imag.tolist()}


def initial_state(x, normalize: bool = True) -> WalkerState:
    """Wrap ``x`` as a time-0 state, scaling it to ``sum |x_i| = 1``."""
    x = np.asarray(x, dtype=complex).copy()
    total = float(np.abs(x).sum())
    if total == 0:
        raise InvalidParameter("initial state is identically zero")
    if normalize:
        x /= total
    elif abs(total - 1.0) > 1e-9:
        raise InvalidParameter(f"initial state has total magnitude {total}, expected 1")
    return WalkerState(x, 0)


def uniform_state(n: int) -> WalkerState:
    return WalkerState(np.full(n, 1.0 / n, dtype=complex), 0)


def _vector(g: ComplexGraph, x) -> np.ndarray:
    if isinstance(x, WalkerState):
        x = x.densities
    x = np.asarray(x, dtype=complex)
    if x.shape != (g.n,):
        raise DimensionMismatch(f"state of length {x.shape} for graph with n={g.n}")
    return x


def walk_step(g: ComplexGraph, state: WalkerState) -> WalkerState:
    x = _vector(g, state)
    return WalkerState(x @ transition_matrix(g), state.time + 1)


def _closed_form_prereq(g: ComplexGraph, mode: Mode) -> np.ndarray:
    if not g.is_connected:
        raise Disconnected("closed-form steady states need a connected graph")
    bal, anti = tree_flags(g)
    if not (bal if mode is Mode.BALANCED else anti):
        raise NotInClass(f"graph is not {mode.value}")
    if is_bipartite(g):
        raise Bipartite("closed-form steady states assume a non-bipartite skeleton")
    return extract_partition(g, mode).node_phases()


def _limit(g: ComplexGraph, x0: np.ndarray, psi: np.ndarray) -> np.ndarray:
    coef = np.sum(x0 * np.exp(-1j * psi))
    d = g.degrees
    return np.exp(1j * psi) * coef * d / d.sum()


def steady_state_balanced(g: ComplexGraph, x0) -> np.ndarray:
    """Limit of a walk on a balanced, non-bipartite graph.

    ``x*_j = exp(i psi_j) (sum_i x_i(0) exp(-i psi_i)) d_j / 2m`` where ``psi``
    are the subset phases of the balanced partition.
    """
    x0 = _vector(g, x0)
    return _limit(g, x0, _closed_form_prereq(g, Mode.BALANCED))


def steady_state_antibalanced(g: ComplexGraph, x0) -> tuple[np.ndarray, np.ndarray]:
    """Odd- and even-time limits on an antibalanced, non-bipartite graph.

    The even limit has the balanced form built from the antibalanced
    partition; the odd limit is its negation.
    """
    x0 = _vector(g, x0)
    even = _limit(g, x0, _closed_form_prereq(g, Mode.ANTIBALANCED))
    return -even, even


def subdominant_modulus(g: ComplexGraph) -> float:
    """Largest ``|lambda|`` of ``P_h`` among eigenvalues strictly inside the unit circle."""
    vals = np.abs(eigvalsh(hermitian_similar_transition(g)))
    inner = vals[vals < 1.0 - UNIT_TOL]
    return float(inner.max()) if inner.size else 0.0


def default_max_t(g: ComplexGraph, tol: float, mu: float | None = None) -> int:
    if mu is None:
        mu = subdominant_modulus(g)
    gap = max(1.0 - mu, 1e-12)
    return int(min(MAX_T_CAP, 10 * math.ceil(math.log(1.0 / tol) / gap)))


def _expected(g: ComplexGraph):
    if not g.is_connected or is_bipartite(g):
        return None
    bal, anti = tree_flags(g)
    if bal:
        return SteadyKind.FIXED
    if anti:
        return SteadyKind.ODD_EVEN
    return SteadyKind.ZERO


def simulate_to_limit(g: ComplexGraph, x0, tol: float = 1e-8,
                      max_t: int | None = None) -> SteadyStateReport:
    """Iterate the walk until a limit pattern is detected.

    Each step checks, in order: Zero (``||x(t)|| < tol``), Fixed
    (``||x(t) - x(t-1)|| < tol (1 - mu)``) and OddEvenAlternating
    (``||x(t) - x(t-2)|| < tol (1 - mu^2)`` while consecutive iterates
    differ by more than ``3 tol``), all in the sup norm. ``mu`` is the
    subdominant eigenvalue modulus, which turns the step difference into a
    bound on the distance to the limit, so a slowly decaying state is not
    mistaken for a fixed point.
    When the graph is balanced or antibalanced (and non-bipartite) the
    detected limit is compared with the closed form.
    """
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    x = _vector(g, x0).copy()
    x_init = x.copy()
    mu = subdominant_modulus(g)
    if max_t is None:
        max_t = default_max_t(g, tol, mu)
    p = transition_matrix(g)
    fixed_tol = tol * (1.0 - mu)
    alt_tol = tol * (1.0 - mu * mu)
    hist = [x]
    kind = None
    t = 0
    if np.max(np.abs(x)) < tol:
        kind = SteadyKind.ZERO
    while kind is None and t < max_t:
        x = hist[-1] @ p
        t += 1
        hist.append(x)
        if len(hist) > 3:
            hist.pop(0)
        if np.max(np.abs(x)) < tol:
            kind = SteadyKind.ZERO
        elif np.max(np.abs(x - hist[-2])) < fixed_tol:
            kind = SteadyKind.FIXED
        elif (len(hist) == 3 and np.max(np.abs(x - hist[0])) < alt_tol
              and np.max(np.abs(x - hist[-2])) > ALT_SEPARATION * tol):
            kind = SteadyKind.ODD_EVEN

    if kind is None:
        points: tuple = (x,)
    elif kind is SteadyKind.ODD_EVEN:
        odd, even = (x, hist[-2]) if t % 2 else (hist[-2], x)
        points = (odd, even)
    else:
        points = (x,)

    expected = _expected(g)
    err = None
    if kind is not None and expected is not None:
        if expected is SteadyKind.FIXED:
            err = float(np.max(np.abs(points[-1] - steady_state_balanced(g, x_init))))
        elif expected is SteadyKind.ODD_EVEN:
            o, e = steady_state_antibalanced(g, x_init)
            if kind is SteadyKind.ODD_EVEN:
                err = float(max(np.max(np.abs(points[0] - o)), np.max(np.abs(points[1] - e))))
            else:
                err = float(min(np.max(np.abs(points[-1] - o)), np.max(np.abs(points[-1] - e))))
        else:
            err = float(np.max(np.abs(points[-1])))
    return SteadyStateReport(kind, points, t if kind is not None else None, t, err, expected)


def phase_grid(g: ComplexGraph, k: int, tol: float = PHASE_TOL) -> np.ndarray:
    """Integer phase classes ``z_ij`` with ``phi_ij = z_ij * 2*pi / k``.

    Raises
    ------
    PhaseGridViolation
        If some edge phase is off the ``k``-grid.
    """
    k = int(k)
    if k < 1:
        raise InvalidParameter("k must be at least 1")
    z = np.rint(g.phase * k / TWO_PI).astype(int) % k
    mask = g.magnitude > 0
    off = circular_distance(g.phase, z * TWO_PI / k) > tol
    if np.any(off & mask):
        i, j = np.argwhere(off & mask)[0]
        raise PhaseGridViolation(f"edge ({i}, {j}) phase {g.phase[i, j]} is not a multiple of 2pi/{k}")
    return np.where(mask, z, -1)


def lifted_adjacency(g: ComplexGraph, k: int) -> np.ndarray:
    """Block-circulant ``nk x nk`` magnitude matrix.

    Block ``(a, b)`` holds the magnitudes of edges whose phase is
    ``((b - a) mod k) * 2*pi / k``, so a walker in class ``a`` that crosses
    such an edge lands in class ``b``.
    """
    z = phase_grid(g, k)
    n = g.n
    out = np.zeros((n * k, n * k))
    for a in range(k):
        for b in range(k):
            block = np.where(z == (b - a) % k, g.magnitude, 0.0)
            out[a * n:(a + 1) * n, b * n:(b + 1) * n] = block
    return out


def lifted_transition(g: ComplexGraph, k: int) -> np.ndarray:
    a = lifted_adjacency(g, k)
    return a / np.tile(g.degrees, k)[:, None]


def phase_class_step(g: ComplexGraph, k: int, s: PhaseClassState) -> PhaseClassState:
    """One step of the phase-class dynamics.

    ``S'[j, b] = sum_i sum_z (r_ij / d_i) [z_ij = z] S[i, b - z]``.
    """
    z = phase_grid(g, k)
    dens = np.asarray(s.densities, dtype=float)
    if dens.shape != (g.n, k):
        raise DimensionMismatch(f"phase-class state must have shape {(g.n, k)}")
    pbar = g.magnitude / g.degrees[:, None]
    out = np.zeros_like(dens)
    for c in range(k):
        mz = np.where(z == c, pbar, 0.0)
        out += mz.T @ np.roll(dens, c, axis=1)
    return PhaseClassState(out, s.time + 1)


def phase_pattern_check(g: ComplexGraph, t: int, tol: float = 1e-8) -> bool:
    """Check ``(P^t)_ij = s^t exp(i theta_ij) (Pbar^t)_ij`` entry-wise.

    ``s = 1`` for a balanced graph and ``-1`` for an antibalanced one, with
    ``theta_ij`` the difference of subset phases of ``j`` and ``i``.
    """
    if t < 1:
        raise InvalidParameter("t must be at least 1")
    bal, anti = tree_flags(g)
    if bal:
        mode, sign = Mode.BALANCED, 1.0
    elif anti:
        mode, sign = Mode.ANTIBALANCED, -1.0
    else:
        raise NotInClass("graph is neither balanced nor antibalanced")
    psi = extract_partition(g, mode).node_phases()
    p = transition_matrix(g)
    pbar = g.magnitude / g.degrees[:, None]
    pt = np.linalg.matrix_power(p, t)
    pbt = np.linalg.matrix_power(pbar, t)
    pattern = sign ** t * np.exp(1j * (psi[None, :] - psi[:, None])) * pbt
    return bool(np.max(np.abs(pt - pattern)) <= tol)
