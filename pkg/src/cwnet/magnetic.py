"""Magnetic Laplacians of directed graphs.

An edge ``i -> j`` alone gets ``a(i, j) = 1`` (and ``a(j, i) = -1``); a
bidirectional pair gets ``a = 0``. With symmetrised weights
``w_s = (w_ij + w_ji) / 2`` the magnetic Laplacian is the complex Laplacian of
the graph ``G^theta`` whose edge ``(i, j)`` carries ``w_s exp(i theta a(i, j))``.

Extreme eigenvalues of the normalized operator follow the balance classes of
``G^theta``: eigenvalue 0 iff ``G^theta`` is balanced and eigenvalue 2 iff it
is antibalanced. Around a cycle with net orientation ``s`` (forward minus
backward edges) and length ``len`` these read ``theta s = 0`` and
``theta s = pi len`` (mod ``2pi``), which is how the theta sets below are
computed exactly.
"""
from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Optional

import numpy as np

from .clustering import kmeans
from .errors import Disconnected, InvalidParameter, TooLarge
from .graph import (TWO_PI, ComplexGraph, DirectedGraph, build_directed_graph,
                    build_graph, circular_distance, wrap_phase)
from .linalg import hermitian_eig

EIG_TOL = 1e-8
CONFIDENCE_TOL = 1e-6
ROLE_GAP = 0.1


def orientation(h: DirectedGraph) -> np.ndarray:
    """``a[i, j]`` in ``{1, -1, 0}`` on skeleton edges, 0 elsewhere."""
    fwd = h.weights > 0
    return fwd.astype(int) - fwd.T.astype(int)


def symmetrized_weights(h: DirectedGraph) -> np.ndarray:
    return 0.5 * (h.weights + h.weights.T)


def magnetic_laplacian(h: DirectedGraph, theta: float) -> np.ndarray:
    """``L[i, i] = sum_j w_s(i, j)`` and ``L[i, j] = -w_s(i, j) exp(i theta a(i, j))``."""
    ws = symmetrized_weights(h)
    a = orientation(h)
    n = h.n
    iu, ju = np.triu_indices(n, 1)
    upper = -ws[iu, ju] * np.exp(1j * theta * a[iu, ju])
    lap = np.zeros((n, n), dtype=complex)
    lap[iu, ju] = upper
    lap[ju, iu] = np.conj(upper)
    lap[np.diag_indices(n)] = ws.sum(axis=1)
    return lap


def induced_complex_graph(h: DirectedGraph, theta: float) -> ComplexGraph:
    """``G^theta``: magnitudes ``w_s``, phase ``theta a(i, j)`` mod ``2pi``."""
    ws = symmetrized_weights(h)
    a = orientation(h)
    iu, ju = np.nonzero(np.triu(ws > 0, 1))
    recs = [(int(i), int(j), float(ws[i, j]), wrap_phase(theta * a[i, j])) for i, j in zip(iu, ju)]
    return build_graph(h.n, recs)


def _degrees(h: DirectedGraph) -> np.ndarray:
    d = symmetrized_weights(h).sum(axis=1)
    if np.any(d <= 0):
        raise Disconnected("directed graph has an isolated node")
    return d


def normalized_magnetic_laplacian(h: DirectedGraph, theta: float) -> np.ndarray:
    """``D^{-1} L^theta`` (not Hermitian; see :func:`magnetic_spectrum`)."""
    return magnetic_laplacian(h, theta) / _degrees(h)[:, None]


def symmetric_normalized_magnetic_laplacian(h: DirectedGraph, theta: float) -> np.ndarray:
    s = 1.0 / np.sqrt(_degrees(h))
    m = magnetic_laplacian(h, theta) * s[:, None] * s[None, :]
    return 0.5 * (m + m.conj().T)


def magnetic_spectrum(h: DirectedGraph, theta: float) -> np.ndarray:
    """Eigenvalues of ``D^{-1} L^theta``, ascending, via ``D^{-1/2} L D^{-1/2}``."""
    return hermitian_eig(symmetric_normalized_magnetic_laplacian(h, theta)).eigenvalues[::-1].copy()


# ---------------------------------------------------------------- cycles

@dataclass(frozen=True)
class EffectiveCycleReport:
    """Fundamental-cycle effective lengths ``|forward - backward|``.

    ``fundamental_lengths`` are the skeleton lengths of the same cycles (their
    parity decides the eigenvalue-2 condition).
    """

    fundamental_effective_lengths: tuple
    fundamental_lengths: tuple
    gcd_nonzero: int
    divisor_set: tuple

    def to_dict(self) -> dict:
        return {
            "fundamental_effective_lengths": list(self.fundamental_effective_lengths),
            "fundamental_lengths": list(self.fundamental_lengths),
            "gcd_nonzero": self.gcd_nonzero,
            "divisor_set": list(self.divisor_set),
        }


def divisors(g: int) -> tuple:
    if g <= 0:
        return ()
    small = [d for d in range(1, math.isqrt(g) + 1) if g % d == 0]
    return tuple(sorted(set(small + [g // d for d in small])))


def effective_cycles(h: DirectedGraph) -> EffectiveCycleReport:
    """Effective lengths over the fundamental cycles of a BFS tree from node 0.

    Along the tree each node gets a net orientation potential; a non-tree
    edge ``(u, v)`` closes a cycle with net orientation
    ``o(u) + a(u, v) - o(v)`` and length ``depth(u) + depth(v) + 1 - 2 depth(lca)``.
    """
    n = h.n
    a = orientation(h)
    adj = h.adjacency_lists
    parent = [-1] * n
    depth = [-1] * n
    pot = [0] * n
    depth[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if depth[v] < 0:
                depth[v] = depth[u] + 1
                parent[v] = u
                pot[v] = pot[u] + int(a[u, v])
                queue.append(v)
    if min(depth) < 0:
        raise Disconnected("underlying skeleton is not connected")

    def lca_depth(u, v):
        while depth[u] > depth[v]:
            u = parent[u]
        while depth[v] > depth[u]:
            v = parent[v]
        while u != v:
            u, v = parent[u], parent[v]
        return depth[u]

    eff, lens = [], []
    for u in range(n):
        for v in adj[u]:
            if v <= u or parent[v] == u or parent[u] == v:
                continue
            eff.append(abs(pot[u] + int(a[u, v]) - pot[v]))
            lens.append(depth[u] + depth[v] + 1 - 2 * lca_depth(u, v))
    nonzero = [e for e in eff if e > 0]
    g = reduce(math.gcd, nonzero, 0)
    return EffectiveCycleReport(tuple(eff), tuple(lens), g, divisors(g))


def enumerate_effective_lengths(h: DirectedGraph, max_n: int = 12) -> list[tuple[int, int]]:
    """``(effective length, length)`` of every simple cycle; a small-graph oracle."""
    n = h.n
    if n > max_n:
        raise TooLarge(f"cycle enumeration limited to n <= {max_n}")
    a = orientation(h)
    adj = h.adjacency_lists
    out = []
    path = []
    on_path = [False] * n

    def dfs(s, v, acc):
        for w in adj[v]:
            if w == s and len(path) >= 3 and path[1] < path[-1]:
                out.append((abs(acc + int(a[v, s])), len(path)))
            elif w > s and not on_path[w]:
                on_path[w] = True
                path.append(w)
                dfs(s, w, acc + int(a[v, w]))
                path.pop()
                on_path[w] = False

    for s in range(n):
        on_path[s] = True
        path.append(s)
        dfs(s, s, 0)
        path.pop()
        on_path[s] = False
    return out


# ---------------------------------------------------------------- theta sets

@dataclass(frozen=True)
class ThetaSet:
    """A set of angles ``theta = 2pi x``; either every angle or finitely many.

    ``fractions`` holds the exact ``x`` values in ``[0, 1)`` when they are
    rational; ``radians`` holds the angles themselves.
    """

    all_theta: bool
    radians: tuple = ()
    fractions: Optional[tuple] = None

    def contains(self, theta: float, tol: float = 1e-9) -> bool:
        if self.all_theta:
            return True
        return any(circular_distance(theta, t) <= tol for t in self.radians)

    def contains_r(self, r: int, tol: float = 1e-9) -> bool:
        """Membership of ``theta = 2pi / r``, exact when fractions are known."""
        if self.all_theta:
            return True
        if self.fractions is not None:
            return Fraction(1, r) % 1 in self.fractions
        return self.contains(TWO_PI / r, tol)

    def to_dict(self) -> dict:
        if self.all_theta:
            return {"all": True, "radians": []}
        out = {"all": False, "radians": list(self.radians)}
        if self.fractions is not None:
            out["fractions_of_2pi"] = [str(f) for f in self.fractions]
        return out


ALL_THETA = ThetaSet(True)
EMPTY_THETA = ThetaSet(False, (), ())


def _from_fractions(fracs) -> ThetaSet:
    fracs = tuple(sorted(set(Fraction(f) % 1 for f in fracs)))
    return ThetaSet(False, tuple(float(TWO_PI * f) for f in fracs), fracs)


def theta_zero_set(h: DirectedGraph) -> ThetaSet:
    """Angles for which ``D^{-1} L^theta`` has eigenvalue 0.

    ``theta s_c = 0`` (mod ``2pi``) on every fundamental cycle, i.e.
    ``theta = 2pi j / g`` with ``g`` the gcd of the nonzero effective lengths;
    every angle when there is none.
    """
    rep = effective_cycles(h)
    if rep.gcd_nonzero == 0:
        return ALL_THETA
    g = rep.gcd_nonzero
    return _from_fractions(Fraction(j, g) for j in range(g))


def theta_two_set(h: DirectedGraph) -> ThetaSet:
    """Angles for which ``D^{-1} L^theta`` has eigenvalue 2.

    Solves ``x s_c = len_c / 2`` (mod 1) with ``theta = 2pi x`` over every
    fundamental cycle. With no nonzero effective length this holds for all
    angles when the skeleton is bipartite (all cycles even) and for none
    otherwise.
    """
    rep = effective_cycles(h)
    cycles = list(zip(rep.fundamental_effective_lengths, rep.fundamental_lengths))
    if any(s == 0 and ln % 2 for s, ln in cycles):
        return EMPTY_THETA
    active = [(s, ln) for s, ln in cycles if s > 0]
    if not active:
        return ALL_THETA
    s0, l0 = active[0]
    cands = [(Fraction(l0, 2) + j) / s0 for j in range(s0)]
    keep = [x for x in cands
            if all((x * s - Fraction(ln, 2)).denominator == 1 for s, ln in active)]
    return _from_fractions(keep)


def divisor_theta_sets(h: DirectedGraph) -> tuple[ThetaSet, ThetaSet]:
    """Divisor-form sets ``{2pi / c}`` and ``{2pi / c + pi}`` over ``c | g``.

    Both are every angle when ``g = 0``. The first agrees with
    :func:`theta_zero_set` on the grid ``theta = 2pi / r``; the second is
    kept for comparison and is not an exact characterisation of eigenvalue 2
    (for a directed triangle at ``theta = pi/3`` the eigenvalue is 2).
    """
    rep = effective_cycles(h)
    if rep.gcd_nonzero == 0:
        return ALL_THETA, ALL_THETA
    zero = _from_fractions(Fraction(1, c) for c in rep.divisor_set)
    two = _from_fractions(Fraction(1, c) + Fraction(1, 2) for c in rep.divisor_set)
    return zero, two


# ---------------------------------------------------------------- sweep

@dataclass(frozen=True, eq=False)
class MagneticSweepResult:
    r_values: np.ndarray
    lambda_min: np.ndarray
    lambda_max: np.ndarray
    predicted_zero_r: tuple
    predicted_two_r: tuple
    divisor_two_r: tuple = ()
    cycles: Optional[EffectiveCycleReport] = None

    def rows(self):
        z, t = set(self.predicted_zero_r), set(self.predicted_two_r)
        for r, lo, hi in zip(self.r_values, self.lambda_min, self.lambda_max):
            yield int(r), float(lo), float(hi), int(r) in z, int(r) in t


def _extremes(h: DirectedGraph, r: int) -> tuple[float, float]:
    vals = magnetic_spectrum(h, TWO_PI / r)
    return float(vals[0]), float(vals[-1])


def sweep(h: DirectedGraph, r_max: int = 100, threads: int = 1) -> MagneticSweepResult:
    """Extreme eigenvalues of the normalized operator at ``theta = 2pi / r``, ``r = 1..r_max``."""
    if r_max < 1:
        raise InvalidParameter("r_max must be at least 1")
    rs = list(range(1, int(r_max) + 1))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            ext = list(ex.map(lambda r: _extremes(h, r), rs))
    else:
        ext = [_extremes(h, r) for r in rs]
    zero, two = theta_zero_set(h), theta_two_set(h)
    _, div_two = divisor_theta_sets(h)
    return MagneticSweepResult(
        np.array(rs),
        np.array([e[0] for e in ext]),
        np.array([e[1] for e in ext]),
        tuple(r for r in rs if zero.contains_r(r)),
        tuple(r for r in rs if two.contains_r(r)),
        tuple(r for r in rs if div_two.contains_r(r)),
        effective_cycles(h),
    )


# ---------------------------------------------------------------- roles

@dataclass(frozen=True, eq=False)
class RoleResult:
    labels: np.ndarray
    eigenvalue: float
    low_confidence: bool
    phases: np.ndarray
    num_roles: int

    def to_dict(self) -> dict:
        return {
            "labels": [int(v) for v in self.labels],
            "eigenvalue": self.eigenvalue,
            "low_confidence": self.low_confidence,
            "phases": [float(p) for p in self.phases],
            "num_roles": self.num_roles,
        }


def phase_gap_count(phases, gap: float = ROLE_GAP) -> int:
    """Number of circular gaps wider than ``gap`` between sorted phases (at least 1)."""
    p = np.sort(np.mod(np.asarray(phases, dtype=float), TWO_PI))
    if p.size == 0:
        return 1
    diffs = np.diff(np.concatenate([p, [p[0] + TWO_PI]]))
    return max(1, int(np.sum(diffs > gap)))


def roles(h: DirectedGraph, theta: float, num_roles: int | None = None, seed: int = 0,
          which: str = "smallest") -> RoleResult:
    """Group nodes by the phases of an extreme eigenvector.

    The eigenvector of ``D^{-1} L^theta`` for its smallest (or largest)
    eigenvalue is rotated so its largest entry is real positive, embedded as
    ``(Re, Im)`` rows and clustered with k-means. ``low_confidence`` is set
    when that eigenvalue is not within ``1e-6`` of 0 (or 2).
    """
    if which not in ("smallest", "largest"):
        raise InvalidParameter("which must be 'smallest' or 'largest'")
    ed = hermitian_eig(symmetric_normalized_magnetic_laplacian(h, theta))
    col = -1 if which == "smallest" else 0
    lam = float(ed.eigenvalues[col])
    vec = ed.eigenvectors[:, col] / np.sqrt(_degrees(h))
    lead = vec[np.argmax(np.abs(vec))]
    vec = vec * np.conj(lead) / abs(lead)
    phases = np.mod(np.angle(vec), TWO_PI)
    if num_roles is None:
        num_roles = phase_gap_count(phases)
    if num_roles < 1:
        raise InvalidParameter("num_roles must be at least 1")
    target = 0.0 if which == "smallest" else 2.0
    low = abs(lam - target) > CONFIDENCE_TOL
    pts = np.column_stack([vec.real, vec.imag])
    labels = kmeans(pts, num_roles, seed).labels
    return RoleResult(labels, lam, bool(low), phases, int(num_roles))


# ---------------------------------------------------------------- generators

def gen_directed_cycle(n: int) -> DirectedGraph:
    """``0 -> 1 -> ... -> n-1 -> 0`` with unit weights."""
    if n < 2:
        raise InvalidParameter("a directed cycle needs n >= 2")
    return build_directed_graph(n, [(i, (i + 1) % n, 1.0) for i in range(n)])


def tree_of_cycles_edges(lengths) -> tuple[int, list]:
    lengths = [int(v) for v in lengths]
    if not lengths or any(v < 2 for v in lengths):
        raise InvalidParameter("cycle lengths must be at least 2")
    edges = []
    n = 0
    anchor = None
    for length in lengths:
        if anchor is None:
            nodes = list(range(length))
            n = length
        else:
            nodes = [anchor] + list(range(n, n + length - 1))
            n += length - 1
        edges += [(nodes[t], nodes[(t + 1) % length], 1.0) for t in range(length)]
        anchor = nodes[-1]
    return n, edges


def gen_tree_of_cycles(lengths) -> DirectedGraph:
    """Directed cycles chained at single shared nodes.

    Cycle ``t + 1`` starts at the last node of cycle ``t``, so consecutive
    cycles share exactly one node and no edge.
    """
    n, edges = tree_of_cycles_edges(lengths)
    return build_directed_graph(n, edges)


def gen_nested_cycles(n: int, chord_from: int, chord_to: int) -> DirectedGraph:
    """A directed ``n``-cycle plus one directed chord ``chord_from -> chord_to``."""
    if n < 3:
        raise InvalidParameter("nested cycles need n >= 3")
    if not (0 <= chord_from < n and 0 <= chord_to < n) or chord_from == chord_to:
        raise InvalidParameter("chord endpoints must be distinct nodes of the cycle")
    if chord_to == (chord_from + 1) % n:
        raise InvalidParameter("chord duplicates a cycle edge")
    edges = [(i, (i + 1) % n, 1.0) for i in range(n)] + [(chord_from, chord_to, 1.0)]
    return build_directed_graph(n, edges)


def gen_supernode_cycle(group_size: int, groups: int = 3) -> tuple[DirectedGraph, np.ndarray]:
    """Groups joined in a directed cycle of supernodes.

    Nodes inside a group are joined by bidirectional edges; every node of
    group ``a`` points to every node of group ``a + 1`` (mod ``groups``).
    Returns the graph and the group label of each node.
    """
    if group_size < 1 or groups < 2:
        raise InvalidParameter("need group_size >= 1 and groups >= 2")
    n = group_size * groups
    label = np.repeat(np.arange(groups), group_size)
    edges = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if label[i] == label[j] or label[j] == (label[i] + 1) % groups:
                edges.append((i, j, 1.0))
    return build_directed_graph(n, edges), label
