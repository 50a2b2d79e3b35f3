"""Cut objectives and two-level spectral clustering.

Indicator convention: a node in subcommunity ``a`` of community ``h`` gets
``exp(i theta_(h,a)) / sqrt(|X_h|)``. An edge from subcommunity ``a`` to ``b``
is expected to carry phase ``theta_a - theta_b``; deviations are penalised by
``1 - cos``. With this convention the general ratio cut equals
``Tr(X* L X)`` exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import DimensionMismatch, InvalidK, InvalidParameter, InvalidSubset
from .graph import TWO_PI, ComplexGraph, laplacian, magnitude_graph, wrap_phase
from .linalg import hermitian_eig

KMEANS_RESTARTS = 20
KMEANS_MAX_ITER = 300
KMEANS_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class TwoLevelPartition:
    """0-based community and subcommunity labels plus subcommunity phases.

    ``theta[(h, a)]`` is the phase of subcommunity ``a`` of community ``h``.
    """

    level_one: np.ndarray
    level_two: np.ndarray
    theta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.level_one)

    @property
    def k(self) -> int:
        return int(self.level_one.max()) + 1

    def subcommunity_counts(self) -> list[int]:
        return [int(self.level_two[self.level_one == h].max()) + 1 for h in range(self.k)]

    def node_theta(self) -> np.ndarray:
        return np.array([self.theta.get((int(h), int(a)), 0.0)
                         for h, a in zip(self.level_one, self.level_two)])

    def flat_labels(self) -> np.ndarray:
        width = int(self.level_two.max()) + 1
        return self.level_one * width + self.level_two

    def to_dict(self) -> dict:
        return {
            "level_one": [int(v) for v in self.level_one],
            "level_two": [int(v) for v in self.level_two],
            "theta": [{"community": int(h), "subcommunity": int(a), "theta": float(t)}
                      for (h, a), t in sorted(self.theta.items())],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TwoLevelPartition":
        theta = {(int(e["community"]), int(e["subcommunity"])): float(e["theta"])
                 for e in d.get("theta", [])}
        return make_partition(d["level_one"], d["level_two"], theta)


def make_partition(level_one, level_two, theta=None) -> TwoLevelPartition:
    """Validate labels and build a :class:`TwoLevelPartition`.

    Community labels must be ``0..k-1`` and subcommunity labels contiguous
    from 0 within each community. Missing phases default to 0.
    """
    l1 = np.asarray(level_one, dtype=int)
    l2 = np.asarray(level_two, dtype=int)
    if l1.shape != l2.shape or l1.ndim != 1 or l1.size == 0:
        raise DimensionMismatch("level labels must be equal-length nonempty vectors")
    if l1.min() < 0 or l2.min() < 0:
        raise InvalidParameter("labels must be nonnegative")
    k = int(l1.max()) + 1
    if set(np.unique(l1)) != set(range(k)):
        raise InvalidParameter("community labels must be contiguous from 0")
    theta = dict(theta or {})
    for h in range(k):
        subs = np.unique(l2[l1 == h])
        if list(subs) != list(range(len(subs))):
            raise InvalidParameter(f"subcommunity labels of community {h} must be contiguous from 0")
        for a in subs:
            theta.setdefault((h, int(a)), 0.0)
    theta = {key: wrap_phase(v) for key, v in theta.items()}
    return TwoLevelPartition(l1, l2, theta)


@dataclass(frozen=True, eq=False)
class CutReport:
    absolute_cuts: np.ndarray
    complex_cuts: list
    gcut: np.ndarray
    grcut: float

    def to_dict(self) -> dict:
        return {
            "absolute_cuts": [float(v) for v in self.absolute_cuts],
            "complex_cuts": [np.asarray(m).tolist() for m in self.complex_cuts],
            "gcut": [float(v) for v in self.gcut],
            "grcut": float(self.grcut),
        }


def _mask(g: ComplexGraph, member) -> np.ndarray:
    m = np.asarray(member)
    if m.dtype == bool:
        if m.shape != (g.n,):
            raise DimensionMismatch(f"membership mask must have length {g.n}")
        return m
    out = np.zeros(g.n, dtype=bool)
    idx = m.astype(int)
    if idx.size and (idx.min() < 0 or idx.max() >= g.n):
        raise InvalidSubset("node index out of range")
    out[idx] = True
    return out


def absolute_cut(g: ComplexGraph, member) -> float:
    """``sum_{i in X, j not in X} r_ij``."""
    x = _mask(g, member)
    if not x.any() or x.all():
        raise InvalidSubset("subset must be nonempty and proper")
    return float(g.magnitude[np.ix_(x, ~x)].sum())


def _cut_or_zero(g: ComplexGraph, x: np.ndarray) -> float:
    if x.all():
        return 0.0
    return float(g.magnitude[np.ix_(x, ~x)].sum())


def complex_cut(g: ComplexGraph, xa, xb, theta_a: float, theta_b: float) -> float:
    """``sum_{i in Xa, j in Xb} (1 - cos(phi_ij - (theta_a - theta_b))) r_ij``."""
    a, b = _mask(g, xa), _mask(g, xb)
    if not np.array_equal(a, b) and np.any(a & b):
        raise InvalidSubset("subcommunities overlap")
    r = g.magnitude[np.ix_(a, b)]
    phi = g.phase[np.ix_(a, b)]
    return float(np.sum(r * (1.0 - np.cos(phi - (theta_a - theta_b)))))


def general_ratio_cut(g: ComplexGraph, p: TwoLevelPartition) -> CutReport:
    if p.n != g.n:
        raise DimensionMismatch(f"partition has {p.n} nodes, graph has {g.n}")
    abs_cuts, ccuts, gcuts = [], [], []
    grcut = 0.0
    for h in range(p.k):
        x = p.level_one == h
        cut = _cut_or_zero(g, x)
        l_h = int(p.level_two[x].max()) + 1
        cc = np.zeros((l_h, l_h))
        for a in range(l_h):
            xa = x & (p.level_two == a)
            for b in range(l_h):
                xb = x & (p.level_two == b)
                cc[a, b] = complex_cut(g, xa, xb, p.theta[(h, a)], p.theta[(h, b)])
        gc = cut + cc.sum()
        abs_cuts.append(cut)
        ccuts.append(cc)
        gcuts.append(gc)
        grcut += gc / x.sum()
    return CutReport(np.array(abs_cuts), ccuts, np.array(gcuts), float(grcut))


def indicator_matrix(p: TwoLevelPartition, n: int | None = None) -> np.ndarray:
    n = p.n if n is None else n
    if n != p.n:
        raise DimensionMismatch(f"partition has {p.n} nodes, expected {n}")
    x = np.zeros((n, p.k), dtype=complex)
    th = p.node_theta()
    for h in range(p.k):
        m = p.level_one == h
        x[m, h] = np.exp(1j * th[m]) / np.sqrt(m.sum())
    return x


def spectral_embedding(g: ComplexGraph, k: int):
    """The ``k`` smallest eigenvalues of ``L`` (ascending) and their eigenvectors."""
    if not 1 <= k <= g.n:
        raise InvalidK(f"k={k} must lie in [1, {g.n}]")
    ed = hermitian_eig(laplacian(g))
    vals = ed.eigenvalues[::-1][:k].copy()
    vecs = ed.eigenvectors[:, ::-1][:, :k].copy()
    return vals, vecs


def estimate_k(eigenvalues, tol: float = 1e-6) -> int:
    """Number of (ascending) Laplacian eigenvalues below ``tol``."""
    return int(np.sum(np.asarray(eigenvalues) < tol))


@dataclass(frozen=True, eq=False)
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float


def _kmeanspp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    m = points.shape[0]
    idx = [int(rng.integers(m))]
    d2 = ((points - points[idx[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(m, p=d2 / total))
        else:
            nxt = int(rng.integers(m))
        idx.append(nxt)
        d2 = np.minimum(d2, ((points - points[nxt]) ** 2).sum(axis=1))
    return points[idx].copy()


def kmeans(points, k: int, seed: int = 0, restarts: int = KMEANS_RESTARTS,
           max_iter: int = KMEANS_MAX_ITER, tol: float = KMEANS_TOL) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding, best of ``restarts`` by inertia.

    Restart ``r`` draws from the ``r``-th child of ``SeedSequence(seed)``, so
    the result depends only on ``seed``.

    Raises
    ------
    InvalidK
        If ``k < 1`` or ``k`` exceeds the number of points.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    m = pts.shape[0]
    if not 1 <= k <= m:
        raise InvalidK(f"k={k} must lie in [1, {m}]")
    best = None
    for child in np.random.SeedSequence(seed).spawn(max(1, restarts)):
        rng = np.random.default_rng(child)
        init = _kmeanspp(pts, k, rng)
        labels, centers, inertia, _ = _backend.lloyd(pts, init, max_iter, tol)
        if best is None or inertia < best.inertia:
            best = KMeansResult(np.asarray(labels, dtype=int), np.asarray(centers), float(inertia))
    return KMeansResult(relabel(best.labels), best.centers, best.inertia)


def relabel(labels) -> np.ndarray:
    """Renumber labels ``0, 1, ...`` in order of first appearance."""
    labels = np.asarray(labels)
    mapping: dict = {}
    out = np.empty(len(labels), dtype=int)
    for i, v in enumerate(labels):
        out[i] = mapping.setdefault(v.item() if hasattr(v, "item") else v, len(mapping))
    return out


def _complex_rows(y: np.ndarray) -> np.ndarray:
    return np.hstack([y.real, y.imag])


def estimate_theta(g: ComplexGraph, level_one, level_two) -> dict:
    """Subcommunity phases from the supernode aggregate ``H_ab = sum W_ij``.

    A maximum-``|H|`` spanning tree over the subcommunities of each community
    is grown from subcommunity 0 (phase 0); along a tree edge
    ``theta_b = theta_a - arg H_ab``.
    """
    l1 = np.asarray(level_one)
    l2 = np.asarray(level_two)
    w = g.weights
    theta = {}
    for h in range(int(l1.max()) + 1):
        x = l1 == h
        l_h = int(l2[x].max()) + 1
        masks = [x & (l2 == a) for a in range(l_h)]
        hm = np.array([[w[np.ix_(masks[a], masks[b])].sum() for b in range(l_h)]
                       for a in range(l_h)])
        th = np.zeros(l_h)
        done = np.zeros(l_h, dtype=bool)
        done[0] = True
        for _ in range(l_h - 1):
            mag = np.where(done[:, None] & ~done[None, :], np.abs(hm), -1.0)
            a, b = np.unravel_index(np.argmax(mag), mag.shape)
            if mag[a, b] <= 0:
                break
            th[b] = th[a] - np.angle(hm[a, b])
            done[b] = True
        for a in range(l_h):
            theta[(h, a)] = wrap_phase(th[a])
    return theta


def spectral_cluster(g: ComplexGraph, k: int, l, seed: int = 0,
                     levelone_magnitude: bool = False,
                     restarts: int = KMEANS_RESTARTS) -> TwoLevelPartition:
    """Two-level spectral clustering.

    Level one runs k-means on the rows of ``|Y|``, where ``Y`` holds the ``k``
    bottom eigenvectors of ``L``; with ``levelone_magnitude`` it uses the
    bottom eigenvectors of the phase-free graph instead. Level two runs
    k-means on ``[Re Y | Im Y]`` restricted to each community.

    Parameters
    ----------
    g : ComplexGraph
    k : int
        Number of level-one communities.
    l : sequence of int
        Subcommunity count per community. Communities are numbered by first
        appearance, so ``l[h]`` applies to the community containing the
        smallest node index not in communities ``0..h-1``.
    seed : int
        Drives every k-means call.
    """
    l = [int(v) for v in l]
    if len(l) != k:
        raise InvalidParameter(f"need {k} subcommunity counts, got {len(l)}")
    if any(v < 1 for v in l) or sum(l) > g.n:
        raise InvalidK("subcommunity counts must be >= 1 and sum to at most n")
    _, y = spectral_embedding(g, k)
    if levelone_magnitude:
        _, ybar = spectral_embedding(magnitude_graph(g), k)
        pts1 = _complex_rows(ybar)
    else:
        pts1 = np.abs(y)
    seeds = np.random.SeedSequence(seed).generate_state(k + 1)
    level_one = kmeans(pts1, k, int(seeds[0]), restarts).labels
    level_two = np.zeros(g.n, dtype=int)
    pts2 = _complex_rows(y)
    for h in range(k):
        idx = np.flatnonzero(level_one == h)
        if l[h] > idx.size:
            raise InvalidK(f"community {h} has {idx.size} nodes, cannot split into {l[h]}")
        level_two[idx] = kmeans(pts2[idx], l[h], int(seeds[h + 1]), restarts).labels
    theta = estimate_theta(g, level_one, level_two)
    return TwoLevelPartition(level_one, level_two, theta)


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(labels_a, labels_b) -> float:
    """Normalized mutual information, geometric-mean normalization, natural log.

    Two constant labelings score 1; a constant labeling against a
    non-constant one scores 0.
    """
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch("labelings must be 1-D and of equal length")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    cont = np.zeros((ai.max() + 1, bi.max() + 1))
    np.add.at(cont, (ai, bi), 1.0)
    ha = _entropy(cont.sum(axis=1))
    hb = _entropy(cont.sum(axis=0))
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0
    n = cont.sum()
    pij = cont / n
    pa = pij.sum(axis=1, keepdims=True)
    pb = pij.sum(axis=0, keepdims=True)
    nz = pij > 0
    mi = float((pij[nz] * np.log(pij[nz] / (pa @ pb)[nz])).sum())
    return float(min(1.0, max(0.0, mi / np.sqrt(ha * hb))))


def hierarchical_nmi(pred: TwoLevelPartition, truth: TwoLevelPartition) -> dict:
    """NMI of the flattened two-level labels, plus per-level scores.

    ``level_two`` is the size-weighted mean, over true communities, of the
    NMI between predicted and true subcommunity labels on that community's
    nodes (predicted labels are flattened so subcommunities of different
    predicted communities stay distinct).
    """
    flat_pred = pred.flat_labels()
    per = []
    for h in range(truth.k):
        m = truth.level_one == h
        per.append((m.sum(), nmi(flat_pred[m], truth.level_two[m])))
    level_two = sum(w * v for w, v in per) / sum(w for w, _ in per)
    return {"flat": nmi(flat_pred, truth.flat_labels()),
            "level_one": nmi(pred.level_one, truth.level_one),
            "level_two": float(level_two)}
