"""Complex stochastic block model with planted two-level structure."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import TwoLevelPartition, make_partition
from .errors import Disconnected, GenerationFailed, InvalidParameter
from .graph import PHASE_TOL, TWO_PI, ComplexGraph, build_graph, components, subgraph, wrap_phase

MAX_ATTEMPTS = 100


@dataclass(frozen=True)
class CsbmParams:
    community_sizes: tuple
    p_in: float
    p_out: float
    eta: float
    l: tuple
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "community_sizes", tuple(int(s) for s in self.community_sizes))
        object.__setattr__(self, "l", tuple(int(v) for v in self.l))
        sizes, l = self.community_sizes, self.l
        if not sizes or any(s < 1 for s in sizes):
            raise InvalidParameter("community sizes must be positive")
        if len(l) != len(sizes):
            raise InvalidParameter("need one subcommunity count per community")
        if any(v < 1 or v > s for v, s in zip(l, sizes)):
            raise InvalidParameter("each subcommunity count must lie in [1, community size]")
        if not (0.0 <= self.p_out <= self.p_in <= 1.0):
            raise InvalidParameter("need 0 <= p_out <= p_in <= 1")
        if not (0.0 <= self.eta <= 1.0):
            raise InvalidParameter("eta must lie in [0, 1]")

    @property
    def n(self) -> int:
        return sum(self.community_sizes)


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    graph: ComplexGraph
    truth: TwoLevelPartition
    attempts: int = 1


def even_split(size: int, parts: int) -> np.ndarray:
    """Labels ``0..parts-1`` over ``size`` slots, remainders to the lowest labels."""
    q, r = divmod(size, parts)
    counts = [q + 1 if a < r else q for a in range(parts)]
    return np.repeat(np.arange(parts), counts)


def planted_labels(params: CsbmParams) -> tuple[np.ndarray, np.ndarray]:
    l1 = np.repeat(np.arange(len(params.community_sizes)), params.community_sizes)
    l2 = np.concatenate([even_split(s, lh) for s, lh in zip(params.community_sizes, params.l)])
    return l1, l2


def planted_theta(params: CsbmParams) -> dict:
    """Subcommunity phases that make the template edge phases exact.

    An edge from subcommunity ``a`` to ``b`` carries ``(b - a) 2pi / l``, which
    equals ``theta_a - theta_b`` for ``theta_a = -a 2pi / l``.
    """
    return {(h, a): wrap_phase(-a * TWO_PI / lh)
            for h, lh in enumerate(params.l) for a in range(lh)}


def _draw(params: CsbmParams, rng: np.random.Generator, l1, l2):
    n = params.n
    iu, ju = np.triu_indices(n, 1)
    same = l1[iu] == l1[ju]
    u = rng.random(iu.size)
    present = np.where(same, u < params.p_in, u < params.p_out)
    iu, ju, same = iu[present], ju[present], same[present]
    lh = np.asarray(params.l)[l1[iu]]
    phase = np.where(same, np.mod((l2[ju] - l2[iu]) * TWO_PI / lh, TWO_PI), 0.0)

    within = np.flatnonzero(same)
    mix = rng.random(within.size) < params.eta
    support = {}
    for h in range(len(params.l)):
        vals = np.unique(phase[within][l1[iu[within]] == h])
        support[h] = vals
    for e in within[mix]:
        vals = support[int(l1[iu[e]])]
        if vals.size > 1:
            vals = vals[np.abs(vals - phase[e]) > PHASE_TOL]
        phase[e] = vals[rng.integers(vals.size)]
    return list(zip(iu.tolist(), ju.tolist(), [1.0] * iu.size, phase.tolist()))


def _connected_enough(g: ComplexGraph, params: CsbmParams, l1) -> bool:
    if params.p_out > 0 or len(params.community_sizes) == 1:
        return g.is_connected
    for h in range(len(params.community_sizes)):
        if len(components(subgraph(g, np.flatnonzero(l1 == h)))) != 1:
            return False
    return True


def generate(params: CsbmParams) -> LabeledGraph:
    """Sample a CSBM graph with its planted two-level truth.

    Draw order from ``numpy.random.default_rng(seed)``: one uniform per node
    pair (upper triangle, row-major) for the skeleton; then one uniform per
    within-community edge (same order) deciding whether its template phase is
    mixed; then one integer per mixed edge choosing the replacement phase from
    the community's template phase values other than the current one.
    Between-community edges have phase 0 and all magnitudes are 1. A sample
    whose skeleton is disconnected (per community when ``p_out == 0``) is
    redrawn from the continuing stream, up to 100 times.

    Raises
    ------
    GenerationFailed
        If no acceptable sample is found.
    """
    rng = np.random.default_rng(params.seed)
    l1, l2 = planted_labels(params)
    truth = make_partition(l1, l2, planted_theta(params))
    for attempt in range(1, MAX_ATTEMPTS + 1):
        recs = _draw(params, rng, l1, l2)
        try:
            g = build_graph(params.n, recs, allow_disconnected=True)
        except Disconnected:
            continue
        if _connected_enough(g, params, l1):
            return LabeledGraph(g, truth, attempt)
    raise GenerationFailed(f"no connected sample in {MAX_ATTEMPTS} attempts")


def phase_histogram(g: ComplexGraph, community) -> dict:
    """Counts of distinct phases (bucketed at ``1e-9``) on edges inside ``community``.

    Phases are read in the ``i < j`` orientation.
    """
    nodes = set(int(v) for v in np.asarray(community).ravel())
    counts: dict[float, int] = {}
    for i, j, _, phi in g.edges():
        if i in nodes and j in nodes:
            for key in counts:
                if abs(key - phi) <= PHASE_TOL:
                    counts[key] += 1
                    break
            else:
                counts[phi] = 1
    return dict(sorted(counts.items()))
