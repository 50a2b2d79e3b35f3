"""Complex-weighted graphs with Hermitian weight matrices.

A :class:`ComplexGraph` stores each undirected edge once as a
``(magnitude, phase)`` pair on the upper triangle. The mirror entry is never
stored independently: ``W[j, i]`` is built as the exact complex conjugate of
``W[i, j]``, so the weight matrix is Hermitian bit-for-bit.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
import math
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .errors import Disconnected, HermitianViolation, InvalidEdge

TWO_PI = 2.0 * np.pi
PHASE_TOL = 1e-9
MIRROR_TOL = 1e-12


def wrap_phase(phi):
    """Reduce phases into ``[0, 2*pi)``; works on scalars and arrays."""
    out = np.mod(phi, TWO_PI)
    out = np.where(out >= TWO_PI, 0.0, out)
    if np.ndim(out) == 0:
        return float(out)
    return out


def circular_distance(a, b):
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI)
    d = np.minimum(d, TWO_PI - d)
    if np.ndim(d) == 0:
        return float(d)
    return d


@dataclass(frozen=True)
class ComplexWeight:
    magnitude: float
    phase: float

    @property
    def value(self) -> complex:
        return complex(self.magnitude * np.exp(1j * self.phase))


@dataclass(frozen=True)
class DegreeVector:
    entries: np.ndarray
    total: float


@dataclass(frozen=True, eq=False)
class ComplexGraph:
    """Undirected-topology graph with Hermitian complex weights.

    ``magnitude[i, j] == magnitude[j, i]`` and ``phase[j, i]`` is the wrapped
    negation of ``phase[i, j]``. Both arrays are read-only. Use
    :func:`build_graph` rather than the constructor.
    """

    magnitude: np.ndarray
    phase: np.ndarray

    @property
    def n(self) -> int:
        return self.magnitude.shape[0]

    @cached_property
    def weights(self) -> np.ndarray:
        n = self.n
        iu, ju = np.triu_indices(n, 1)
        upper = self.magnitude[iu, ju] * np.exp(1j * self.phase[iu, ju])
        upper = np.where(self.magnitude[iu, ju] > 0, upper, 0.0)
        w = np.zeros((n, n), dtype=complex)
        w[iu, ju] = upper
        w[ju, iu] = np.conj(upper)
        w.setflags(write=False)
        return w

    @cached_property
    def adjacency_lists(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(j) for j in np.flatnonzero(row > 0)) for row in self.magnitude)

    @cached_property
    def degrees(self) -> np.ndarray:
        # correctly rounded, so any regrouping of a row's magnitudes gives the same value
        d = np.array([math.fsum(row) for row in self.magnitude])
        d.setflags(write=False)
        return d

    @cached_property
    def is_connected(self) -> bool:
        return len(components(self)) == 1

    def edges(self) -> list[tuple[int, int, float, float]]:
        """Each undirected edge once, as ``(i, j, r, phi)`` with ``i < j``."""
        iu, ju = np.nonzero(np.triu(self.magnitude, 1))
        return [(int(i), int(j), float(self.magnitude[i, j]), float(self.phase[i, j]))
                for i, j in zip(iu, ju)]

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.magnitude, 1)))

    def weight(self, i: int, j: int) -> ComplexWeight:
        return ComplexWeight(float(self.magnitude[i, j]), float(self.phase[i, j]))


def _from_upper(n: int, upper: dict, allow_disconnected: bool) -> ComplexGraph:
    mag = np.zeros((n, n))
    ph = np.zeros((n, n))
    for (i, j), (r, phi) in upper.items():
        mag[i, j] = mag[j, i] = r
        ph[i, j] = phi
        ph[j, i] = wrap_phase(-phi)
    mag.setflags(write=False)
    ph.setflags(write=False)
    g = ComplexGraph(mag, ph)
    if np.any(g.degrees <= 0):
        isolated = [int(i) for i in np.flatnonzero(g.degrees <= 0)]
        raise Disconnected(f"isolated node(s) {isolated}")
    if not allow_disconnected and not g.is_connected:
        raise Disconnected("underlying skeleton is not connected")
    return g


def build_graph(n: int, edge_records: Iterable[Sequence], *,
                allow_disconnected: bool = False) -> ComplexGraph:
    """Build a :class:`ComplexGraph` from ``(i, j, magnitude, phase)`` records.

    Each edge may be listed once (the mirror is inferred) or in both
    directions, in which case the two records must be Hermitian mirrors of
    each other within ``1e-12``.

    Parameters
    ----------
    n : int
        Number of nodes.
    edge_records : iterable of (i, j, r, phi)
        0-based endpoints, magnitude ``r > 0`` and phase in ``[0, 2*pi)``.
    allow_disconnected : bool
        Accept a skeleton with several components (isolated nodes are still
        rejected). Needed for planted benchmarks with no inter-block edges.

    Raises
    ------
    InvalidEdge
        Self-loop, out-of-range endpoint, nonpositive magnitude or phase out
        of range.
    HermitianViolation
        Two records for the same node pair disagree.
    Disconnected
        Isolated node, or disconnected skeleton unless allowed.
    """
    n = int(n)
    if n < 1:
        raise InvalidEdge("graph needs at least one node")
    upper: dict[tuple[int, int], tuple[float, float]] = {}
    for rec in edge_records:
        if len(rec) != 4:
            raise InvalidEdge(f"edge record {rec!r} must have 4 fields")
        i, j, r, phi = int(rec[0]), int(rec[1]), float(rec[2]), float(rec[3])
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidEdge(f"edge ({i}, {j}) out of range for n={n}")
        if i == j:
            raise InvalidEdge(f"self-loop at node {i}")
        if not np.isfinite(r) or r <= 0:
            raise InvalidEdge(f"edge ({i}, {j}) has nonpositive magnitude {r}")
        if not np.isfinite(phi) or not (0.0 <= phi < TWO_PI):
            raise InvalidEdge(f"edge ({i}, {j}) phase {phi} outside [0, 2pi)")
        key, up_phi = ((i, j), phi) if i < j else ((j, i), wrap_phase(-phi))
        if key in upper:
            r0, phi0 = upper[key]
            if abs(r0 - r) > MIRROR_TOL * max(1.0, r0) or circular_distance(phi0, up_phi) > MIRROR_TOL:
                raise HermitianViolation(
                    f"records for pair {key} are not Hermitian mirrors "
                    f"({r0}, {phi0}) vs ({r}, {up_phi})")
            continue
        upper[key] = (r, up_phi)
    return _from_upper(n, upper, allow_disconnected)


def graph_from_weights(w: np.ndarray, *, allow_disconnected: bool = False, tol: float = 1e-12) -> ComplexGraph:
    """Build a graph from a dense Hermitian matrix (diagonal must be zero)."""
    w = np.asarray(w, dtype=complex)
    n = w.shape[0]
    if np.max(np.abs(w - w.conj().T), initial=0.0) > tol * max(1.0, np.max(np.abs(w), initial=0.0)):
        raise HermitianViolation("weight matrix is not Hermitian")
    if np.any(np.abs(np.diag(w)) > 0):
        raise InvalidEdge("weight matrix has self-loops")
    iu, ju = np.nonzero(np.triu(np.abs(w) > 0, 1))
    recs = [(i, j, abs(w[i, j]), wrap_phase(np.angle(w[i, j]))) for i, j in zip(iu, ju)]
    return build_graph(n, recs, allow_disconnected=allow_disconnected)


def with_phases(g: ComplexGraph, upper_phase: np.ndarray) -> ComplexGraph:
    """Same topology and magnitudes, phases taken from the upper triangle of ``upper_phase``."""
    upper = {(i, j): (r, wrap_phase(upper_phase[i, j])) for i, j, r, _ in g.edges()}
    return _from_upper(g.n, upper, allow_disconnected=True)


def degree_vector(g: ComplexGraph) -> DegreeVector:
    d = np.array(g.degrees)
    return DegreeVector(d, float(d.sum()))


def laplacian(g: ComplexGraph) -> np.ndarray:
    return np.diag(g.degrees).astype(complex) - g.weights


def random_walk_laplacian(g: ComplexGraph) -> np.ndarray:
    return np.eye(g.n) - transition_matrix(g)


def transition_matrix(g: ComplexGraph) -> np.ndarray:
    return g.weights / g.degrees[:, None]


def hermitian_similar_transition(g: ComplexGraph) -> np.ndarray:
    """``D^{-1/2} W D^{-1/2}``, Hermitian by construction."""
    s = 1.0 / np.sqrt(g.degrees)
    n = g.n
    iu, ju = np.triu_indices(n, 1)
    upper = g.weights[iu, ju] * s[iu] * s[ju]
    p = np.zeros((n, n), dtype=complex)
    p[iu, ju] = upper
    p[ju, iu] = np.conj(upper)
    return p


def magnitude_graph(g: ComplexGraph) -> ComplexGraph:
    return with_phases(g, np.zeros((g.n, g.n)))


def negated(g: ComplexGraph) -> ComplexGraph:
    """The graph with ``pi`` added to every edge phase (weight matrix ``-W``)."""
    return with_phases(g, g.phase + np.pi)


def components(g: ComplexGraph) -> list[list[int]]:
    seen = [False] * g.n
    comps = []
    adj = g.adjacency_lists
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [s], deque([s])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


def subgraph(g: ComplexGraph, nodes: Sequence[int]) -> ComplexGraph:
    """Induced subgraph, nodes relabelled ``0..len(nodes)-1`` in the given order."""
    nodes = [int(v) for v in nodes]
    index = {v: k for k, v in enumerate(nodes)}
    recs = [(index[i], index[j], r, phi) for i, j, r, phi in g.edges()
            if i in index and j in index]
    return build_graph(len(nodes), recs, allow_disconnected=True)


def bfs_tree(g: ComplexGraph, root: int = 0):
    """BFS order, parent array and depth array over the component of ``root``."""
    parent = [-1] * g.n
    depth = [-1] * g.n
    depth[root] = 0
    order = [root]
    queue = deque([root])
    adj = g.adjacency_lists
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if depth[v] < 0:
                depth[v] = depth[u] + 1
                parent[v] = u
                order.append(v)
                queue.append(v)
    return order, parent, depth


def is_bipartite(g: ComplexGraph) -> bool:
    for comp in components(g):
        _, _, depth = bfs_tree(g, comp[0])
        for i, j, _, _ in g.edges():
            if depth[i] >= 0 and (depth[i] - depth[j]) % 2 == 0:
                return False
    return True


def period(g: ComplexGraph) -> int:
    """Period of the walk on the skeleton.

    The gcd runs over fundamental-cycle lengths together with 2, since every
    edge traversed back and forth is a closed walk of length 2. The result is
    therefore 1 (aperiodic) or 2 (bipartite).
    """
    p = 2
    for comp in components(g):
        _, _, depth = bfs_tree(g, comp[0])
        for i, j, _, _ in g.edges():
            if depth[i] >= 0:
                p = gcd(p, depth[i] + depth[j] + 1)
    return p


def is_aperiodic(g: ComplexGraph) -> bool:
    return period(g) == 1


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Directed graph with positive edge weights; ``weights[i, j]`` is ``w_ij``."""

    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def edges(self) -> list[tuple[int, int, float]]:
        ii, jj = np.nonzero(self.weights)
        return [(int(i), int(j), float(self.weights[i, j])) for i, j in zip(ii, jj)]

    @cached_property
    def skeleton(self) -> np.ndarray:
        return (self.weights > 0) | (self.weights.T > 0)

    @cached_property
    def adjacency_lists(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(j) for j in np.flatnonzero(row)) for row in self.skeleton)


def build_directed_graph(n: int, edge_records: Iterable[Sequence]) -> DirectedGraph:
    """Build a :class:`DirectedGraph` from ``(i, j, w)`` records.

    Repeated records for the same ordered pair must carry the same weight.
    """
    n = int(n)
    if n < 1:
        raise InvalidEdge("graph needs at least one node")
    w = np.zeros((n, n))
    for rec in edge_records:
        if len(rec) != 3:
            raise InvalidEdge(f"directed edge record {rec!r} must have 3 fields")
        i, j, wij = int(rec[0]), int(rec[1]), float(rec[2])
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidEdge(f"edge ({i}, {j}) out of range for n={n}")
        if i == j:
            raise InvalidEdge(f"self-loop at node {i}")
        if not np.isfinite(wij) or wij <= 0:
            raise InvalidEdge(f"edge ({i}, {j}) has nonpositive weight {wij}")
        if w[i, j] > 0 and w[i, j] != wij:
            raise InvalidEdge(f"edge ({i}, {j}) listed twice with different weights")
        w[i, j] = wij
    w.setflags(write=False)
    h = DirectedGraph(w)
    sk = h.skeleton
    if np.any(~sk.any(axis=1)):
        raise Disconnected("directed graph has an isolated node")
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in h.adjacency_lists[u]:
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    if not seen.all():
        raise Disconnected("underlying skeleton is not connected")
    return h
