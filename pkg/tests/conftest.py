import numpy as np
import pytest
from hypothesis import settings

from cwnet.graph import TWO_PI, build_graph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def er_records(n, p, rng, phases=None, mags=(0.0, 2.0)):
    """Connected Erdos-Renyi records: a random spanning path plus extra edges."""
    perm = rng.permutation(n)
    pairs = {tuple(sorted((int(perm[t]), int(perm[t + 1])))) for t in range(n - 1)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                pairs.add((i, j))
    recs = []
    for i, j in sorted(pairs):
        r = mags[1] - (mags[1] - mags[0]) * rng.random()  # in (lo, hi]
        if phases is None:
            phi = TWO_PI * rng.random()
        else:
            phi = float(rng.choice(phases))
        recs.append((i, j, r, phi))
    return recs


def random_graph(n, p, rng, phases=None, mags=(0.0, 2.0)):
    return build_graph(n, er_records(n, p, rng, phases, mags))


def zero_phase_graph(n, p, rng, mags=(0.0, 2.0)):
    return build_graph(n, [(i, j, r, 0.0) for i, j, r, _ in er_records(n, p, rng, None, mags)])


def triangle(phi=(0.0, 0.0, 0.0), r=(1.0, 1.0, 1.0)):
    return build_graph(3, [(0, 1, r[0], phi[0]), (1, 2, r[1], phi[1]), (0, 2, r[2], phi[2])])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
