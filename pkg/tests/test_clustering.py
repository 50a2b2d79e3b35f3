import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.metrics import normalized_mutual_info_score

from conftest import random_graph, triangle, zero_phase_graph
from cwnet.clustering import (TwoLevelPartition, absolute_cut, complex_cut, estimate_k,
                              estimate_theta, general_ratio_cut, hierarchical_nmi,
                              indicator_matrix, kmeans, make_partition, nmi, relabel,
                              spectral_cluster, spectral_embedding)
from cwnet.csbm import CsbmParams, generate
from cwnet.errors import (DimensionMismatch, InvalidK, InvalidParameter, InvalidSubset)
from cwnet.graph import TWO_PI, build_graph, laplacian


def random_partition(n, rng, max_k=3, max_l=3):
    k = int(rng.integers(1, min(max_k, n) + 1))
    l1 = np.concatenate([np.arange(k), rng.integers(0, k, n - k)])
    rng.shuffle(l1)
    l2 = np.zeros(n, dtype=int)
    for h in range(k):
        idx = np.flatnonzero(l1 == h)
        lh = int(rng.integers(1, min(max_l, idx.size) + 1))
        lab = np.concatenate([np.arange(lh), rng.integers(0, lh, idx.size - lh)])
        rng.shuffle(lab)
        l2[idx] = lab
    theta = {(h, a): TWO_PI * rng.random() for h in range(k) for a in range(max_l)}
    p = make_partition(l1, l2)
    return make_partition(l1, l2, {key: theta[key] for key in p.theta})


def trace_form(g, p):
    x = indicator_matrix(p)
    return float(np.trace(x.conj().T @ laplacian(g) @ x).real)


def test_absolute_cut_examples():
    assert absolute_cut(triangle(), [0]) == 2
    path = build_graph(3, [(0, 1, 2, 0), (1, 2, 3, 0)])
    assert absolute_cut(path, [0, 1]) == 3
    two = build_graph(4, [(0, 1, 1, 0), (2, 3, 1, 0)], allow_disconnected=True)
    assert absolute_cut(two, [0, 1]) == 0
    for bad in ([], [0, 1, 2]):
        with pytest.raises(InvalidSubset):
            absolute_cut(triangle(), bad)


def test_complex_cut_examples():
    g = build_graph(2, [(0, 1, 1.0, 0.7)])
    assert complex_cut(g, [0], [1], 0.7, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert complex_cut(g, [0], [1], 0.7 - np.pi, 0.0) == pytest.approx(2.0)
    with pytest.raises(InvalidSubset):
        complex_cut(triangle(), [0, 1], [1, 2], 0, 0)


def test_signed_cut_specialization(rng):
    # phases in {0, pi}, theta in {0, pi}: gcut = cut + cut-(X1,X1) + cut-(X2,X2) + 2 cut+(X1,X2)
    g = random_graph(12, 0.5, rng, phases=[0.0, np.pi])
    l2 = rng.integers(0, 2, 12)
    l2[:2] = [0, 1]
    p = make_partition(np.zeros(12, dtype=int), l2, {(0, 0): 0.0, (0, 1): np.pi})
    neg = np.where(np.isclose(g.phase, np.pi), g.magnitude, 0)
    pos = np.where(np.isclose(g.phase, 0) & (g.magnitude > 0), g.magnitude, 0)
    x1, x2 = l2 == 0, l2 == 1
    # ordered-pair sums: each undirected within-set edge counted twice
    expected = (2 * neg[np.ix_(x1, x1)].sum() + 2 * neg[np.ix_(x2, x2)].sum()
                + 2 * 2 * pos[np.ix_(x1, x2)].sum())
    rep = general_ratio_cut(g, p)
    assert rep.gcut[0] == pytest.approx(expected)


def test_ideal_csbm_zero_grcut():
    lg = generate(CsbmParams((20, 20), 0.5, 0.0, 0.0, (2, 3), seed=3))
    rep = general_ratio_cut(lg.graph, lg.truth)
    assert rep.grcut == pytest.approx(0.0, abs=1e-12)


def test_single_community_classic_zero(rng):
    g = zero_phase_graph(9, 0.4, rng)
    p = make_partition(np.zeros(9, dtype=int), np.zeros(9, dtype=int))
    assert general_ratio_cut(g, p).grcut == pytest.approx(0.0, abs=1e-13)
    x = indicator_matrix(p)
    np.testing.assert_allclose(x[:, 0], np.full(9, 1 / 3))


def test_partition_validation():
    with pytest.raises(InvalidParameter):
        make_partition([0, 2], [0, 0])
    with pytest.raises(InvalidParameter):
        make_partition([0, 0], [0, 2])
    with pytest.raises(DimensionMismatch):
        make_partition([0, 0], [0])
    p = make_partition([0, 0, 1], [0, 1, 0], {(0, 1): 1.0})
    assert TwoLevelPartition.from_dict(p.to_dict()).to_dict() == p.to_dict()


def test_spectral_embedding_examples(rng):
    g = zero_phase_graph(8, 0.5, rng)
    vals, vecs = spectral_embedding(g, 1)
    assert vals[0] == pytest.approx(0, abs=1e-12)
    np.testing.assert_allclose(np.abs(vecs[:, 0]), 1 / np.sqrt(8), atol=1e-12)
    assert estimate_k(spectral_embedding(g, 3)[0]) == 1
    unb = triangle((np.pi / 2, 0, 0))
    vals, _ = spectral_embedding(unb, 1)
    assert vals[0] > 1e-6 and estimate_k(vals) == 0
    with pytest.raises(InvalidK):
        spectral_embedding(g, 9)


def test_estimate_k_two_components():
    recs = [(0, 1, 1, 0.5), (1, 2, 1, 0.5), (0, 2, 1, 1.0), (3, 4, 1, np.pi), (4, 5, 1, 0), (3, 5, 1, np.pi)]
    g = build_graph(6, recs, allow_disconnected=True)
    assert estimate_k(spectral_embedding(g, 6)[0]) == 2


def test_kmeans_examples(rng):
    pts = np.vstack([rng.normal(0, 0.1, (20, 2)), rng.normal(10, 0.1, (20, 2))])
    res = kmeans(pts, 2, seed=1)
    np.testing.assert_array_equal(res.labels, [0] * 20 + [1] * 20)
    assert np.all(kmeans(pts, 1).labels == 0)
    same = kmeans(np.ones((6, 2)), 3)
    assert same.inertia == 0
    with pytest.raises(InvalidK):
        kmeans(pts, 41)


def test_kmeans_matches_sklearn_inertia(rng):
    from sklearn.cluster import KMeans
    pts = np.vstack([rng.normal(c, 0.6, (30, 3)) for c in (0, 3, 6, 9)])
    ours = kmeans(pts, 4, seed=0)
    theirs = KMeans(4, n_init=20, random_state=0).fit(pts)
    assert ours.inertia == pytest.approx(theirs.inertia_, rel=1e-6)
    assert nmi(ours.labels, theirs.labels_) == pytest.approx(1.0)


def test_relabel_first_appearance():
    np.testing.assert_array_equal(relabel([5, 5, 2, 7, 2]), [0, 0, 1, 2, 1])


def test_nmi_examples():
    a = [0, 0, 1, 1, 2, 2]
    assert nmi(a, a) == 1.0
    assert nmi(a, [2, 2, 0, 0, 1, 1]) == pytest.approx(1.0)
    assert nmi([0] * 6, [0, 0, 0, 1, 1, 1]) == 0.0
    assert nmi([0] * 6, [1] * 6) == 1.0
    with pytest.raises(DimensionMismatch):
        nmi([0, 1], [0])


@given(st.lists(st.integers(0, 4), min_size=2, max_size=40), st.integers(0, 2 ** 32 - 1))
def test_nmi_matches_sklearn(a, seed):
    b = np.random.default_rng(seed).integers(0, 3, len(a))
    ours = nmi(a, b)
    if len(set(a)) > 1 and len(set(b)) > 1:
        ref = normalized_mutual_info_score(a, b, average_method="geometric")
        assert ours == pytest.approx(ref, abs=1e-12)
    assert nmi(b, a) == pytest.approx(ours, abs=1e-15)
    assert 0.0 <= ours <= 1.0


def test_estimate_theta_exact_on_balanced_template():
    lg = generate(CsbmParams((30,), 0.6, 0.0, 0.0, (3,), seed=0))
    th = estimate_theta(lg.graph, lg.truth.level_one, lg.truth.level_two)
    for key, val in lg.truth.theta.items():
        assert abs(np.angle(np.exp(1j * (th[key] - val)))) < 1e-9


def test_ideal_recovery_two_disconnected_balanced_communities():
    lg = generate(CsbmParams((30, 30), 0.5, 0.0, 0.0, (2, 3), seed=11))
    p = spectral_cluster(lg.graph, 2, (2, 3), seed=0)
    # community numbering follows first appearance; truth community 0 holds node 0
    assert nmi(p.level_one, lg.truth.level_one) == 1.0
    scores = hierarchical_nmi(p, lg.truth)
    assert scores["flat"] == pytest.approx(1.0)
    assert general_ratio_cut(lg.graph, p).grcut == pytest.approx(0.0, abs=1e-9)


def test_easy_two_community_csbm():
    scores = []
    for seed in range(20):
        lg = generate(CsbmParams((60, 60), 0.4, 0.005, 0.0, (2, 2), seed=seed))
        p = spectral_cluster(lg.graph, 2, (2, 2), seed=seed, levelone_magnitude=True)
        scores.append(hierarchical_nmi(p, lg.truth)["flat"])
    assert np.mean(scores) >= 0.95


def test_single_cluster_classic(rng):
    p = spectral_cluster(zero_phase_graph(10, 0.4, rng), 1, [1])
    assert np.all(p.level_one == 0) and np.all(p.level_two == 0)


def test_spectral_cluster_deterministic():
    lg = generate(CsbmParams((40,), 0.5, 0.0, 0.2, (3,), seed=5))
    a = spectral_cluster(lg.graph, 1, [3], seed=9)
    b = spectral_cluster(lg.graph, 1, [3], seed=9)
    np.testing.assert_array_equal(a.level_two, b.level_two)
    with pytest.raises(InvalidParameter):
        spectral_cluster(lg.graph, 1, [2, 2])


seeds = st.integers(0, 2 ** 32 - 1)


@given(seeds, st.integers(2, 25))
def test_trace_identity(seed, n):
    rng = np.random.default_rng(seed)
    g = random_graph(n, 0.4, rng)
    p = random_partition(n, rng)
    gr = general_ratio_cut(g, p).grcut
    assert abs(gr - trace_form(g, p)) <= 1e-10 * max(1.0, gr)
    x = indicator_matrix(p)
    np.testing.assert_allclose(x.conj().T @ x, np.eye(p.k), atol=1e-12)


@given(seeds, st.integers(3, 20))
def test_relaxation_lower_bound(seed, n):
    rng = np.random.default_rng(seed)
    g = random_graph(n, 0.4, rng)
    p = random_partition(n, rng)
    vals, _ = spectral_embedding(g, p.k)
    assert vals.sum() <= general_ratio_cut(g, p).grcut + 1e-9


@given(seeds)
def test_kmeans_deterministic(seed):
    pts = np.random.default_rng(seed).normal(size=(30, 2))
    a, b = kmeans(pts, 3, seed=seed), kmeans(pts, 3, seed=seed)
    np.testing.assert_array_equal(a.labels, b.labels)
