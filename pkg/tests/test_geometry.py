import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgewire.errors import InvalidArgument, InvalidEdge
from edgewire.geometry import (
    ParamEdge,
    PointCloud,
    Segment,
    Wireframe,
    canonical_quadrant,
    endpoints_from_params,
    farthest_point_sampling,
    params_from_segment,
    sample_edge_points,
)

coord = st.floats(-100, 100, allow_nan=False, allow_infinity=False)
vec3 = st.tuples(coord, coord, coord)


@pytest.mark.parametrize(
    "v, quadrant, comp",
    [
        ((2, 0, 0), 0, (2, 0, 0)),
        ((-1, 1, 0), 2, (1, 1, 0)),
        ((0, 0, -3), 0, (0, 0, 3)),
        ((1, 1, -1), 1, (1, 1, 1)),
        ((-1, 1, 1), 3, (1, 1, 1)),
        ((0, -2, 5), 1, (0, 2, 5)),
    ],
)
def test_canonical_quadrant_examples(v, quadrant, comp):
    q, c = canonical_quadrant(v)
    assert q == quadrant
    np.testing.assert_array_equal(c, comp)


def test_canonical_quadrant_zero_vector():
    with pytest.raises(InvalidEdge):
        canonical_quadrant((0, 0, 0))


def test_every_quadrant_class_reachable():
    seen = {canonical_quadrant(s)[0] for s in itertools.product((-1, 1), repeat=3)}
    assert seen == {0, 1, 2, 3}


@given(vec3)
def test_quadrant_sign_flip_invariant(v):
    if not any(v):
        return
    q1, c1 = canonical_quadrant(v)
    q2, c2 = canonical_quadrant(tuple(-x for x in v))
    assert q1 == q2
    np.testing.assert_array_equal(c1, c2)


def test_endpoints_from_params_examples():
    s = endpoints_from_params(ParamEdge((0, 0, 0), (2, 0, 0), 0))
    np.testing.assert_allclose(s.a, (1, 0, 0))
    np.testing.assert_allclose(s.b, (-1, 0, 0))

    s = endpoints_from_params(ParamEdge((0.5, 0.5, 0), (1, 1, 0), 2))
    np.testing.assert_allclose(s.a, (1, 0, 0))
    np.testing.assert_allclose(s.b, (0, 1, 0))

    with pytest.raises(InvalidEdge):
        endpoints_from_params(ParamEdge((1, 1, 1), (0, 0, 0), 0))


def test_params_from_segment_examples():
    p = params_from_segment(Segment((1, 0, 0), (-1, 0, 0)))
    np.testing.assert_array_equal(p.midpoint, (0, 0, 0))
    np.testing.assert_array_equal(p.comp, (2, 0, 0))
    assert p.quadrant == 0 and p.confidence == 1.0

    p = params_from_segment(Segment((0, 1, 0), (1, 0, 0)))
    np.testing.assert_array_equal(p.midpoint, (0.5, 0.5, 0))
    np.testing.assert_array_equal(p.comp, (1, 1, 0))
    assert p.quadrant == 2

    with pytest.raises(InvalidEdge):
        params_from_segment(Segment((1, 2, 3), (1, 2, 3)))


def test_round_trip_random_segments(rng):
    for _ in range(1000):
        s = Segment(rng.uniform(-20, 20, 3), rng.uniform(-20, 20, 3))
        p = params_from_segment(s)
        back = endpoints_from_params(p)
        assert back.same_as(s, tol=1e-12)
        p2 = params_from_segment(back)
        assert p2.quadrant == p.quadrant
        np.testing.assert_allclose(p2.midpoint, p.midpoint, atol=1e-12, rtol=0)
        np.testing.assert_allclose(p2.comp, p.comp, atol=1e-12, rtol=0)


@settings(max_examples=300)
@given(vec3, vec3)
def test_round_trip_property(a, b):
    if a == b:
        return
    s = Segment(a, b)
    p = params_from_segment(s)
    back = endpoints_from_params(p)
    assert back.same_as(s, tol=1e-12)
    # midpoint preserved to rounding
    np.testing.assert_allclose(back.midpoint, p.midpoint, atol=1e-12, rtol=0)


def test_round_trip_axis_aligned_edges():
    for d in [(3, 0, 0), (0, 3, 0), (0, 0, 3), (0, 2, -2), (2, 0, -2), (-2, 0, 2)]:
        s = Segment((1, 1, 1), np.add((1, 1, 1), d))
        back = endpoints_from_params(params_from_segment(s))
        assert back.same_as(s, tol=0.0)


def test_sample_edge_points():
    s = Segment((0, 0, 0), (1, 0, 0))
    np.testing.assert_array_equal(sample_edge_points(s, 2), [[0, 0, 0], [1, 0, 0]])
    np.testing.assert_array_equal(sample_edge_points(s, 3)[1], [0.5, 0, 0])

    s = Segment((1, -2, 3), (4, 2, 3))
    pts = sample_edge_points(s, 5)
    gaps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    np.testing.assert_allclose(gaps, s.length / 4)
    np.testing.assert_array_equal(pts[0], s.a)
    np.testing.assert_array_equal(pts[-1], s.b)

    with pytest.raises(InvalidArgument):
        sample_edge_points(s, 1)


def _spread(points):
    return min(np.linalg.norm(p - q) for p, q in itertools.combinations(points, 2))


def test_fps_three_points_matches_exhaustive_spread():
    cloud = PointCloud([(0, 0, 0), (1, 0, 0), (10, 0, 0)])
    picked = farthest_point_sampling(cloud, 2)
    np.testing.assert_array_equal(picked, [(10, 0, 0), (0, 0, 0)])
    best = max(itertools.combinations(cloud.points, 2), key=_spread)
    assert _spread(picked) == _spread(best)


def test_fps_edge_cases(rng):
    pts = rng.normal(size=(20, 3))
    cloud = PointCloud(pts)
    everything = farthest_point_sampling(cloud, 20)
    assert sorted(map(tuple, everything)) == sorted(map(tuple, pts))

    one = farthest_point_sampling(cloud, 1)
    far = pts[np.argmax(np.linalg.norm(pts - pts.mean(axis=0), axis=1))]
    np.testing.assert_array_equal(one[0], far)

    with pytest.raises(InvalidArgument):
        farthest_point_sampling(cloud, 21)
    with pytest.raises(InvalidArgument):
        farthest_point_sampling(PointCloud(np.zeros((0, 3))), 1)


def test_fps_deterministic_and_tie_break():
    pts = np.array([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)], dtype=float)
    a = farthest_point_sampling(PointCloud(pts), 3)
    b = farthest_point_sampling(PointCloud(pts), 3)
    assert a.tobytes() == b.tobytes()
    # all four are equidistant from the centroid: index 0 wins, then its antipode
    np.testing.assert_array_equal(a[:2], [(1, 0, 0), (-1, 0, 0)])


def test_wireframe_invariants():
    verts = np.zeros((3, 3))
    Wireframe(verts, [(0, 1), (1, 2)])
    with pytest.raises(InvalidArgument):
        Wireframe(verts, [(0, 3)])
    with pytest.raises(InvalidArgument):
        Wireframe(verts, [(1, 1)])
    with pytest.raises(InvalidArgument):
        Wireframe(verts, [(0, 1), (1, 0)])


def test_point_cloud_attrs_length():
    PointCloud(np.zeros((2, 3)), np.zeros((2, 4)))
    with pytest.raises(InvalidArgument):
        PointCloud(np.zeros((2, 3)), np.zeros((3, 4)))
    with pytest.raises(InvalidArgument):
        PointCloud([(0, 0, np.nan)])


def test_param_edge_validation():
    with pytest.raises(InvalidArgument):
        ParamEdge((0, 0, 0), (-1, 0, 0))
    with pytest.raises(InvalidArgument):
        ParamEdge((0, 0, 0), (1, 0, 0), quadrant=4)
    with pytest.raises(InvalidArgument):
        ParamEdge((0, 0, 0), (1, 0, 0), confidence=1.5)
