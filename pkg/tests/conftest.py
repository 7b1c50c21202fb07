import itertools

import numpy as np
import pytest

from edgewire.fitter import FitConfig
from edgewire.geometry import Segment, Wireframe
from edgewire.losses import LossWeights
from edgewire.synthetic import RoofSpec, generate_roof

# Settings shared by the end-to-end fixtures.
E2E_ROOF = dict(noise_sigma=0.02, dropout_fraction=0.1, seed=7)
E2E_FIT = FitConfig(num_queries=32, iterations=3000, step_size=0.1, rematch_every=10, seed=0)
E2E_LOSS = LossWeights(lambda_con=4.0)

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def gable():
    return generate_roof(RoofSpec(kind="gable", **E2E_ROOF))


@pytest.fixture(scope="session")
def hip():
    return generate_roof(RoofSpec(kind="hip", **E2E_ROOF))


def random_segment(rng, scale=5.0):
    a = rng.uniform(-scale, scale, 3)
    b = a + rng.uniform(-scale, scale, 3)
    return Segment(a, b)


def random_wireframe(rng, n_vertices=None, n_edges=None):
    n = n_vertices or int(rng.integers(2, 12))
    verts = rng.uniform(-10, 10, (n, 3))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    k = n_edges or int(rng.integers(1, len(pairs) + 1))
    pick = rng.choice(len(pairs), size=min(k, len(pairs)), replace=False)
    return Wireframe(verts, [pairs[p] for p in pick])


def dense_hausdorff(e_i, e_j, K=4096):
    """Point-set Hausdorff distance between K uniform samples of each edge."""
    from scipy.spatial.distance import directed_hausdorff

    t = np.linspace(0.0, 1.0, K)[:, None]
    p = (1 - t) * e_i.a + t * e_i.b
    q = (1 - t) * e_j.a + t * e_j.b
    return max(directed_hausdorff(p, q)[0], directed_hausdorff(q, p)[0])


def brute_force_assignments(cost):
    """All injective assignments of the smaller side, as sorted pair lists."""
    cost = np.asarray(cost)
    n_rows, n_cols = cost.shape
    out = []
    if n_rows <= n_cols:
        for cols in itertools.permutations(range(n_cols), n_rows):
            out.append([(i, c) for i, c in enumerate(cols)])
    else:
        for rows in itertools.permutations(range(n_rows), n_cols):
            out.append(sorted((r, j) for j, r in enumerate(rows)))
    return out


def brute_force_optimum(cost):
    """(minimum total, lexicographically smallest optimal pair list)."""
    import math

    cost = np.asarray(cost, dtype=float)
    best = None
    best_pairs = None
    for pairs in brute_force_assignments(cost):
        total = math.fsum(cost[i, j] for i, j in pairs)
        if best is None or total < best or (total == best and pairs < best_pairs):
            best, best_pairs = total, pairs
    return best, best_pairs


def central_difference(f, x, h=1e-5):
    g = np.zeros_like(x)
    for k in range(len(x)):
        xp = x.copy()
        xm = x.copy()
        xp[k] += h
        xm[k] -= h
        g[k] = (f(xp) - f(xm)) / (2 * h)
    return g
