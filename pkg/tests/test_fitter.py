import numpy as np
import pytest

from conftest import random_segment
from edgewire.errors import InvalidArgument
from edgewire.fitter import FitConfig, edge_nms, filter_by_confidence, fit, init_queries
from edgewire.geometry import PointCloud, Segment, Wireframe, farthest_point_sampling
from edgewire.losses import PredictionSet
from edgewire.similarity import SimilarityWeights, edge_similarity, similarity_matrix
from edgewire.synthetic import RoofSpec, generate_roof


def test_init_queries_single(gable):
    cloud, _ = gable
    p = init_queries(cloud, FitConfig(num_queries=1))
    assert len(p) == 1
    np.testing.assert_array_equal(p.midpoints[0], farthest_point_sampling(cloud, 1)[0])
    assert p.confidences[0] == 0.5
    assert p.quadrants[0] == 0


def test_init_queries_fps_and_determinism():
    cloud, _ = generate_roof(RoofSpec(kind="gable", seed=3))
    cfg = FitConfig(num_queries=128, seed=5)
    a = init_queries(cloud, cfg)
    b = init_queries(cloud, cfg)
    np.testing.assert_array_equal(a.midpoints, farthest_point_sampling(cloud, 128))
    assert a.comps.tobytes() == b.comps.tobytes()
    assert np.all(a.comps >= 0)
    # comps scatter around (1, 0, 0)
    assert abs(a.comps[:, 0].mean() - 1.0) < 0.05
    assert a.comps[:, 1:].mean() < 0.15
    c = init_queries(cloud, FitConfig(num_queries=128, seed=6))
    assert not np.array_equal(a.comps, c.comps)


def test_init_queries_cloud_too_small():
    with pytest.raises(InvalidArgument):
        init_queries(PointCloud(np.zeros((3, 3))), FitConfig(num_queries=4))


def test_fit_config_validation():
    with pytest.raises(InvalidArgument):
        FitConfig(num_queries=0)
    with pytest.raises(InvalidArgument):
        FitConfig(conf_threshold=1.5)
    with pytest.raises(InvalidArgument):
        FitConfig(labels="fuzzy")


def test_fit_fixed_point(gable):
    _, gt = gable
    init = PredictionSet.from_segments(gt.segments(), confidences=np.ones(9))
    cfg = FitConfig(num_queries=9, iterations=200)
    final, trace = fit(None, gt, cfg, init=init)
    assert len(trace) == cfg.iterations + 1
    assert max(trace) <= 1e-6
    for s, g in zip(final.segments(), gt.segments()):
        assert s.same_as(g, tol=1e-6)


def test_fit_single_edge_converges():
    gt = Wireframe([(0, 0, 0), (2, 1, 0.5)], [(0, 1)])
    target = gt.segments()[0]
    start = Segment(target.a + (0.5, 0, 0), target.b + (0.5, 0, 0))
    init = PredictionSet.from_segments([start], confidences=[0.5])
    cfg = FitConfig(num_queries=1, iterations=2000, step_size=1e-2, step_halvings=0)
    final, trace = fit(None, gt, cfg, init=init)
    assert edge_similarity(final.segments()[0], target) < 0.05
    assert trace[-1] < trace[0]


def test_fit_rejects_too_few_queries(gable):
    _, gt = gable
    init = PredictionSet.from_segments(gt.segments()[:3])
    with pytest.raises(InvalidArgument):
        fit(None, gt, FitConfig(num_queries=3, iterations=1), init=init)


@pytest.mark.parametrize("kind", ["flat", "gable", "hip", "l_shaped"])
def test_fit_trace_final_below_initial(kind):
    cloud, gt = generate_roof(RoofSpec(kind=kind, seed=1))
    _, trace = fit(cloud, gt, FitConfig(num_queries=24, iterations=300, seed=1))
    assert trace[-1] <= trace[0]
    assert all(np.isfinite(trace))


def test_fit_deterministic(gable):
    cloud, gt = gable
    cfg = FitConfig(num_queries=16, iterations=100)
    a, ta = fit(cloud, gt, cfg)
    b, tb = fit(cloud, gt, cfg)
    assert ta == tb
    assert a.midpoints.tobytes() == b.midpoints.tobytes()


def conf_set(confidences, segments=None):
    n = len(confidences)
    if segments is None:
        segments = [Segment((10 * k, 0, 0), (10 * k + 1, 0, 0)) for k in range(n)]
    return PredictionSet.from_segments(segments, confidences=confidences)


def test_filter_by_confidence():
    p = conf_set([0.9, 0.69, 0.71])
    kept = filter_by_confidence(p, 0.7)
    np.testing.assert_array_equal(kept.confidences, [0.9, 0.71])
    np.testing.assert_array_equal(kept.midpoints, p.midpoints[[0, 2]])
    assert len(filter_by_confidence(p, 0.0)) == 3
    np.testing.assert_array_equal(filter_by_confidence(conf_set([1.0, 0.99, 1.0]), 1.0).confidences, [1, 1])
    with pytest.raises(InvalidArgument):
        filter_by_confidence(p, 1.2)


def test_nms_identical_pair():
    s = Segment((0, 0, 0), (1, 0, 0))
    kept = edge_nms(conf_set([0.8, 0.9], [s, s]))
    np.testing.assert_array_equal(kept.confidences, [0.9])


def test_nms_far_perpendicular_edges_kept():
    a = Segment((0, 0, 0), (1, 0, 0))
    b = Segment((5, 5, 0), (5, 6, 0))
    sim = edge_similarity(a, b)
    for tau in (0.1, 0.5, sim * 0.99):
        assert len(edge_nms(conf_set([0.6, 0.7], [a, b]), tau=tau)) == 2


def test_nms_empty_and_validation():
    empty = PredictionSet(np.zeros((0, 3)), np.zeros((0, 3)), [], np.zeros((0, 4)))
    assert len(edge_nms(empty)) == 0
    with pytest.raises(InvalidArgument):
        edge_nms(conf_set([0.5]), tau=0.0)


def random_pred_set(rng, n):
    segs = [random_segment(rng, 2.0) for _ in range(n)]
    conf = np.round(rng.uniform(0, 1, n), 1)  # rounding creates ties
    return PredictionSet.from_segments(segs, confidences=conf)


def as_rows(p):
    return {tuple(np.round(np.concatenate([p.midpoints[k], p.comps[k], [p.confidences[k]]]), 12))
            for k in range(len(p))}


def test_nms_properties(rng):
    w = SimilarityWeights()
    tau = 0.5
    for _ in range(200):
        p = random_pred_set(rng, int(rng.integers(1, 15)))
        kept = edge_nms(p, w, tau)
        assert as_rows(kept) <= as_rows(p)
        top = int(np.lexsort((np.arange(len(p)), -p.confidences))[0])
        np.testing.assert_array_equal(kept.midpoints[0], p.midpoints[top])
        assert np.all(np.diff(kept.confidences) <= 0)
        if len(kept) > 1:
            sims = similarity_matrix(kept.segments(), kept.segments(), w)
            off = sims[~np.eye(len(kept), dtype=bool)]
            assert np.all(off > tau)
        again = edge_nms(kept, w, tau)
        assert again.midpoints.tobytes() == kept.midpoints.tobytes()
        assert again.confidences.tobytes() == kept.confidences.tobytes()
