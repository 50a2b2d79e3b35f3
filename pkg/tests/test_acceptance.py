"""End-to-end acceptance checks, one test per criterion.

Each test appends a PASS/FAIL line to ``conftest.ACCEPTANCE`` (printed in the
terminal summary) and then asserts. Graphs used by criteria 1 to 7 are kept so
criterion 8 can check spectrum bounds on every one of them.
"""
import math
import time

import numpy as np

from conftest import ACCEPTANCE, er_records, random_graph, zero_phase_graph
from cwnet.balance import (BalanceClass, brute_force_classify, classify, classify_spectral,
                           gauge_transform)
from cwnet.clustering import general_ratio_cut, indicator_matrix, make_partition
from cwnet.csbm import CsbmParams, generate
from cwnet.graph import (TWO_PI, build_graph, hermitian_similar_transition, is_bipartite,
                         laplacian, magnitude_graph, negated)
from cwnet.linalg import eigvalsh, spectral_radius
from cwnet.magnetic import divisors, effective_cycles, sweep, theta_two_set
from cwnet.randwalk import (PhaseClassState, SteadyKind, initial_state, lifted_adjacency,
                            lifted_transition, phase_class_step, simulate_to_limit)
from cwnet.repro import (DIRECTED_CYCLE_SIZES, fig4_cells, fig5_cells, magnetic_graphs,
                         run_cell, sample_seed)

QUARTER = [0.0, np.pi / 2, np.pi, 3 * np.pi / 2]
TOUCHED = []           # complex graphs from criteria 1 to 5
SWEEPS = []            # (name, MagneticSweepResult) from criterion 7
CSBM_RUNS = []         # (cell, seed) pairs from criterion 6, regenerated on demand


def report(num, ok, detail, elapsed, limit=None):
    within = limit is None or elapsed < limit
    line = (f"criterion {num}: {'PASS' if ok and within else 'FAIL'} | {detail} | "
            f"{elapsed:.1f}s" + (f" (limit {limit}s)" if limit else ""))
    ACCEPTANCE.append(line)
    print(line)
    return ok and within


def gauge_corpus():
    rng = np.random.default_rng(20240101)
    out = []
    for _ in range(100):
        base = zero_phase_graph(30, 0.2, rng)
        out.append((base, gauge_transform(base, TWO_PI * rng.random(30))))
    return out


CORPUS = gauge_corpus()


def test_criterion_1_balance_spectrum():
    t0 = time.perf_counter()
    worst = 0.0
    for base, g in CORPUS:
        worst = max(worst, float(np.max(np.abs(eigvalsh(g.weights) - eigvalsh(base.weights)))))
        TOUCHED.extend((base, g))
    ok = worst <= 1e-8
    assert report(1, ok, f"max |lambda(W) - lambda(|W|)| = {worst:.2e} over 100 graphs",
                  time.perf_counter() - t0, 30)


def test_criterion_2_antibalance_mirror():
    t0 = time.perf_counter()
    worst = 0.0
    for base, g in CORPUS:
        a = negated(g)
        worst = max(worst, float(np.max(np.abs(eigvalsh(a.weights) + eigvalsh(base.weights)[::-1]))))
        TOUCHED.append(a)
    ok = worst <= 1e-8
    assert report(2, ok, f"max |lambda_i(W) + lambda_(n+1-i)(|W|)| = {worst:.2e}",
                  time.perf_counter() - t0)


def _on_cycle(g, i, j):
    """True when edge (i, j) is not a bridge."""
    import networkx as nx
    sk = nx.Graph([(a, b) for a, b, _, _ in g.edges() if (a, b) != (i, j)])
    sk.add_nodes_from(range(g.n))
    return nx.has_path(sk, i, j)


def test_criterion_3_strict_unbalance():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    gaps, rejected = [], 0
    while len(gaps) < 100:
        base = zero_phase_graph(30, 0.2, rng)
        g = gauge_transform(base, TWO_PI * rng.random(30))
        if rng.random() < 0.5:
            g = negated(g)
        edges = [(i, j, r, phi) for i, j, r, phi in g.edges()]
        idx = int(rng.integers(len(edges)))
        i, j, r, phi = edges[idx]
        if not _on_cycle(g, i, j):
            rejected += 1
            continue
        # move the phase well away from both the balanced and antibalanced values
        delta = float(rng.uniform(0.3, np.pi - 0.3))
        edges[idx] = (i, j, r, (phi + delta) % TWO_PI)
        h = build_graph(30, edges)
        if classify(h).balance_class is not BalanceClass.STRICTLY_UNBALANCED:
            rejected += 1
            continue
        gaps.append(spectral_radius(magnitude_graph(h).weights) - spectral_radius(h.weights))
        TOUCHED.append(h)
    agree = 0
    for s in range(500):
        n = 3 + s % 6
        g = random_graph(n, 0.5, rng, phases=QUARTER)
        flags = {(c.balanced, c.antibalanced)
                 for c in (classify(g), classify_spectral(g), brute_force_classify(g))}
        agree += len(flags) == 1
        TOUCHED.append(g)
    ok = min(gaps) > 0 and agree == 500
    assert report(3, ok, f"min rho(|W|) - rho(W) = {min(gaps):.3e} over 100 graphs "
                  f"({rejected} draws skipped); classifiers agree on {agree}/500",
                  time.perf_counter() - t0)


def test_criterion_4_walk_limits():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    results = {SteadyKind.FIXED: [], SteadyKind.ODD_EVEN: [], SteadyKind.ZERO: []}
    for kind in results:
        while len(results[kind]) < 10:
            if kind is SteadyKind.ZERO:
                g = random_graph(50, 0.2, rng)
            else:
                g = gauge_transform(zero_phase_graph(50, 0.2, rng), TWO_PI * rng.random(50))
                if kind is SteadyKind.ODD_EVEN:
                    g = negated(g)
            if is_bipartite(g):
                continue
            x0 = initial_state(rng.normal(size=50) + 1j * rng.normal(size=50)).densities
            rep = simulate_to_limit(g, x0, tol=1e-8, max_t=10 ** 5)
            results[kind].append((rep.kind is kind and rep.expected_kind is kind,
                                  rep.closed_form_error, rep.steps))
            TOUCHED.append(g)
    flat = [r for rs in results.values() for r in rs]
    kinds_ok = sum(k for k, _, _ in flat)
    err = max(e for _, e, _ in flat)
    ok = kinds_ok == len(flat) and err <= 1e-6
    assert report(4, ok, f"{kinds_ok}/{len(flat)} kinds correct, max closed-form error {err:.2e}, "
                  f"max steps {max(s for _, _, s in flat)}", time.perf_counter() - t0, 60)


def _random_partition(n, rng):
    k = int(rng.integers(1, 4))
    l1 = np.concatenate([np.arange(k), rng.integers(0, k, n - k)])
    rng.shuffle(l1)
    l2 = np.zeros(n, dtype=int)
    for h in range(k):
        idx = np.flatnonzero(l1 == h)
        lh = int(rng.integers(1, min(3, idx.size) + 1))
        lab = np.concatenate([np.arange(lh), rng.integers(0, lh, idx.size - lh)])
        rng.shuffle(lab)
        l2[idx] = lab
    p = make_partition(l1, l2)
    return make_partition(l1, l2, {key: TWO_PI * rng.random() for key in p.theta})


def test_criterion_5_trace_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(6, 31))
        g = random_graph(n, 0.3, rng)
        lap = laplacian(g)
        TOUCHED.append(g)
        for _ in range(100):
            p = _random_partition(n, rng)
            x = indicator_matrix(p)
            gr = general_ratio_cut(g, p).grcut
            tr = float(np.trace(x.conj().T @ lap @ x).real)
            worst = max(worst, abs(gr - tr) / max(1.0, abs(gr)))
    ok = worst <= 1e-10
    assert report(5, ok, f"max relative |grcut - Tr(X*LX)| = {worst:.2e} over 100x100",
                  time.perf_counter() - t0)


def test_criterion_6_csbm_reproduction():
    t0 = time.perf_counter()
    fails, worst_a, allowance = [], 1.0, []
    for idx, cell in enumerate(fig4_cells()):
        mean = float(run_cell(cell, idx, 20, 0).mean())
        CSBM_RUNS.extend((cell, sample_seed(0, idx, s)) for s in range(20))
        thr = 0.6 if (cell.l == (2,) and cell.eta == 0.3) else 0.8
        if thr == 0.6:
            allowance.append(mean)
        else:
            worst_a = min(worst_a, mean)
        if mean < thr:
            fails.append(f"single l={cell.l[0]} p_in={cell.p_in} eta={cell.eta}: {mean:.3f} < {thr}")
    worst_b = 1.0
    for idx, cell in enumerate(fig5_cells()):
        if cell.p_out > 0.05 or cell.eta > 0.2:
            continue
        mean = float(run_cell(cell, idx, 20, 0, levelone_magnitude=True).mean())
        CSBM_RUNS.extend((cell, sample_seed(0, idx, s)) for s in range(20))
        worst_b = min(worst_b, mean)
        if mean < 0.75:
            fails.append(f"two-level l={cell.l} p_in={cell.p_in} p_out={cell.p_out} "
                         f"eta={cell.eta}: {mean:.3f} < 0.75")
    detail = (f"{len(fails)} failing cells; worst single-community mean {worst_a:.3f}, "
              f"l=2 eta=0.3 cells min {min(allowance):.3f}; worst two-level mean {worst_b:.3f}"
              + ("; " + "; ".join(fails) if fails else ""))
    assert report(6, not fails, detail, time.perf_counter() - t0, 900)


def test_criterion_7_magnetic_conditions():
    t0 = time.perf_counter()
    graphs = magnetic_graphs("fig8") + magnetic_graphs("fig10") + magnetic_graphs("fig12")
    assert len(graphs) == len(DIRECTED_CYCLE_SIZES) + 4 + 3
    bad, disagree = [], []
    for name, h in graphs:
        res = sweep(h, 100)
        SWEEPS.append((name, res))
        g = effective_cycles(h).gcd_nonzero
        zero_pred = set(range(1, 101)) if g == 0 else set(divisors(g))
        two = theta_two_set(h)
        for r, lo, hi in zip(res.r_values, res.lambda_min, res.lambda_max):
            r = int(r)
            if (lo <= 1e-8) != (r in zero_pred):
                bad.append(f"{name} r={r} lambda_min={lo:.2e}")
            if (hi >= 2 - 1e-8) != two.contains(TWO_PI / r, 1e-9):
                bad.append(f"{name} r={r} lambda_max={hi:.10f}")
        if set(res.divisor_two_r) != set(res.predicted_two_r):
            disagree.append(name)
    ok = not bad
    assert report(7, ok, f"{len(graphs)} graphs x 100 values of r, {len(bad)} mismatches"
                  + (": " + "; ".join(bad[:5]) if bad else ""), time.perf_counter() - t0, 120)
    ACCEPTANCE.append("criterion 7 (info): divisor formula for the eigenvalue-2 set differs from "
                      f"the exact set on {len(disagree)} graphs: {', '.join(disagree) or 'none'}")


def test_criterion_8_spectrum_bounds():
    t0 = time.perf_counter()
    lap_min, norm_lo, norm_hi, count = math.inf, math.inf, -math.inf, 0

    def check(g):
        nonlocal lap_min, norm_lo, norm_hi, count
        lap_min = min(lap_min, float(eigvalsh(laplacian(g))[-1]))
        vals = 1.0 - eigvalsh(hermitian_similar_transition(g))
        norm_lo, norm_hi = min(norm_lo, vals.min()), max(norm_hi, vals.max())
        count += 1

    for g in TOUCHED:
        check(g)
    for cell, seed in CSBM_RUNS:
        check(generate(CsbmParams(cell.sizes, cell.p_in, cell.p_out, cell.eta, cell.l, seed)).graph)
    for _, res in SWEEPS:
        norm_lo = min(norm_lo, float(res.lambda_min.min()))
        norm_hi = max(norm_hi, float(res.lambda_max.max()))
    ok = (count > 0 and lap_min >= -1e-10 and norm_lo >= -1e-9 and norm_hi <= 2 + 1e-9
          and len(SWEEPS) > 0)
    assert report(8, ok, f"{count} complex graphs and {len(SWEEPS)} magnetic sweeps; "
                  f"min lambda(L) = {lap_min:.2e}; normalized spectra in "
                  f"[{norm_lo:.2e}, {norm_hi:.12f}]", time.perf_counter() - t0)


def test_criterion_9_lifted_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    worst, rows_exact, total = 0.0, 0, 0
    for k in (2, 3, 4):
        for _ in range(30):
            n = int(rng.integers(3, 16))
            recs = [(i, j, r, (int(rng.integers(k)) * TWO_PI / k) % TWO_PI)
                    for i, j, r, _ in er_records(n, 0.4, rng)]
            g = build_graph(n, recs)
            a = lifted_adjacency(g, k)
            rows_exact += np.array_equal([math.fsum(row) for row in np.abs(a)], np.tile(g.degrees, k))
            total += 1
            pk = lifted_transition(g, k)
            s = PhaseClassState(rng.random((n, k)))
            y = s.flatten()
            for _ in range(10):
                s = phase_class_step(g, k, s)
                y = y @ pk
                worst = max(worst, float(np.max(np.abs(s.flatten() - y))))
    ok = worst <= 1e-12 and rows_exact == total
    assert report(9, ok, f"max |flattened step - lifted step| = {worst:.2e}; "
                  f"row sums exact on {rows_exact}/{total}", time.perf_counter() - t0)
