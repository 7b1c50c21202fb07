"""Geometric types, the midpoint/component/quadrant edge encoding, and sampling.

Points are plain ``numpy`` arrays of shape ``(3,)``; collections of points are
``(N, 3)`` arrays.  An edge is undirected, so its direction vector ``v`` and
``-v`` describe the same edge.  The encoding stores ``|v|`` per axis plus one
of four sign classes ("quadrants") of the canonical representative of
``{v, -v}``:

======== ===================
quadrant sign of (x, y, z)
======== ===================
0        (+, +, +)
1        (+, +, -)
2        (+, -, +)
3        (+, -, -)
======== ===================

The canonical representative has its first nonzero component (x, then y,
then z) positive; zero components count as positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isfinite
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidArgument, InvalidEdge

QUADRANT_SIGNS = np.array(
    [
        [1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0],
        [1.0, -1.0, 1.0],
        [1.0, -1.0, -1.0],
    ]
)


def as_point(p) -> np.ndarray:
    arr = np.array(p, dtype=float)
    if arr.shape != (3,):
        arr = arr.reshape(3)
    x, y, z = arr.tolist()
    if not (isfinite(x) and isfinite(y) and isfinite(z)):
        raise InvalidArgument(f"non-finite coordinates: {arr}")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Segment:
    """Undirected 3D line segment between ``a`` and ``b``.

    Construction does not reject zero-length segments; operations that need a
    proper edge raise :class:`InvalidEdge` instead.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(as_point(self.a)))
        object.__setattr__(self, "b", _frozen(as_point(self.b)))

    @property
    def vector(self) -> np.ndarray:
        return self.a - self.b

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.a - self.b))

    @property
    def midpoint(self) -> np.ndarray:
        return (self.a + self.b) / 2.0

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)

    def same_as(self, other: "Segment", tol: float = 0.0) -> bool:
        """True if both segments have the same endpoints in either order."""
        fwd = max(np.max(np.abs(self.a - other.a)), np.max(np.abs(self.b - other.b)))
        bwd = max(np.max(np.abs(self.a - other.b)), np.max(np.abs(self.b - other.a)))
        return bool(min(fwd, bwd) <= tol)

    def __repr__(self):
        return f"Segment({self.a.tolist()}, {self.b.tolist()})"


def check_segment(s: Segment) -> None:
    if s.a.tolist() == s.b.tolist():
        raise InvalidEdge(f"degenerate segment at {s.a.tolist()}")


@dataclass(frozen=True, eq=False)
class ParamEdge:
    """Edge stored as midpoint, per-axis absolute components and a quadrant."""

    midpoint: np.ndarray
    comp: np.ndarray
    quadrant: int = 0
    confidence: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "midpoint", _frozen(as_point(self.midpoint)))
        comp = as_point(self.comp)
        if min(comp.tolist()) < 0:
            raise InvalidArgument(f"components must be non-negative, got {comp}")
        object.__setattr__(self, "comp", _frozen(comp))
        if int(self.quadrant) not in (0, 1, 2, 3):
            raise InvalidArgument(f"quadrant must be in 0..3, got {self.quadrant}")
        object.__setattr__(self, "quadrant", int(self.quadrant))
        if not 0.0 <= float(self.confidence) <= 1.0:
            raise InvalidArgument(f"confidence must be in [0, 1], got {self.confidence}")
        object.__setattr__(self, "confidence", float(self.confidence))


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Ordered points with optional per-point RGB + reflectance."""

    points: np.ndarray
    attrs: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 3)
        if not np.all(np.isfinite(pts)):
            raise InvalidArgument("point cloud contains non-finite coordinates")
        object.__setattr__(self, "points", _frozen(pts))
        if self.attrs is not None:
            attrs = np.array(self.attrs, dtype=float).reshape(-1, 4)
            if len(attrs) != len(pts):
                raise InvalidArgument(
                    f"attrs has {len(attrs)} rows but there are {len(pts)} points"
                )
            object.__setattr__(self, "attrs", _frozen(attrs))

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True, eq=False)
class Wireframe:
    """Vertex array plus undirected edges as vertex-index pairs."""

    vertices: np.ndarray
    edges: List[Tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        verts = np.array(self.vertices, dtype=float).reshape(-1, 3)
        object.__setattr__(self, "vertices", _frozen(verts))
        edges = [(int(i), int(j)) for i, j in self.edges]
        seen = set()
        n = len(verts)
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidArgument(f"edge ({i}, {j}) out of range for {n} vertices")
            if i == j:
                raise InvalidArgument(f"self-loop at vertex {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InvalidArgument(f"duplicate edge {key}")
            seen.add(key)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def empty(cls) -> "Wireframe":
        return cls(np.zeros((0, 3)), [])

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def edge_keys(self) -> set:
        return {(min(i, j), max(i, j)) for i, j in self.edges}

    def segments(self) -> List[Segment]:
        return [Segment(self.vertices[i], self.vertices[j]) for i, j in self.edges]


def canonical_quadrant(v) -> Tuple[int, np.ndarray]:
    """Return ``(quadrant, |v|)`` for the undirected direction ``v``."""
    v = as_point(v)
    x, y, z = v.tolist()
    lead = x if x != 0 else (y if y != 0 else z)
    if lead == 0:
        raise InvalidEdge("zero direction vector")
    if lead < 0:
        y, z = -y, -z
    quadrant = 2 * int(y < 0) + int(z < 0)
    return quadrant, np.abs(v)


def endpoints_from_params(p: ParamEdge) -> Segment:
    if max(p.comp.tolist()) <= 0:
        raise InvalidEdge("all edge components are zero")
    half = QUADRANT_SIGNS[p.quadrant] * p.comp / 2.0
    return Segment(p.midpoint + half, p.midpoint - half)


def params_from_segment(s: Segment) -> ParamEdge:
    check_segment(s)
    quadrant, comp = canonical_quadrant(s.a - s.b)
    return ParamEdge((s.a + s.b) / 2.0, comp, quadrant, 1.0)


def sample_edge_points(s: Segment, K: int) -> np.ndarray:
    """``K`` evenly spaced points from ``s.a`` to ``s.b`` inclusive, shape (K, 3)."""
    if K < 2:
        raise InvalidArgument(f"need at least 2 samples per edge, got {K}")
    t = np.linspace(0.0, 1.0, K)[:, None]
    return (1.0 - t) * s.a + t * s.b


def farthest_point_sampling(cloud: PointCloud, M: int) -> np.ndarray:
    """Pick ``M`` spread-out points, returned in selection order as (M, 3).

    The first pick is the point farthest from the centroid; each next pick
    maximizes the distance to the nearest already-chosen point.  Ties go to
    the lowest index, so the result is fully deterministic.
    """
    pts = cloud.points
    n = len(pts)
    if n == 0:
        raise InvalidArgument("cannot sample from an empty point cloud")
    if M < 1 or M > n:
        raise InvalidArgument(f"M must be in [1, {n}], got {M}")

    centroid = pts.mean(axis=0)
    first = int(np.argmax(np.linalg.norm(pts - centroid, axis=1)))
    chosen = [first]
    min_dist = np.linalg.norm(pts - pts[first], axis=1)
    for _ in range(M - 1):
        nxt = int(np.argmax(min_dist))
        chosen.append(nxt)
        np.minimum(min_dist, np.linalg.norm(pts - pts[nxt], axis=1), out=min_dist)
    return pts[chosen].copy()


def closest_on_segments(p: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Closest points from ``p`` to segments ``[a, b]``, broadcasting.

    Returns ``(dist, s, q)`` where ``q = a + s (b - a)`` with ``s`` in [0, 1].
    """
    d = b - a
    dd = np.sum(d * d, axis=-1)
    s = np.sum((p - a) * d, axis=-1) / np.where(dd > 0, dd, 1.0)
    s = np.clip(s, 0.0, 1.0)
    q = a + s[..., None] * d
    dist = np.linalg.norm(p - q, axis=-1)
    return dist, s, q


def segments_to_arrays(segments: Sequence[Segment]) -> Tuple[np.ndarray, np.ndarray]:
    if not segments:
        return np.zeros((0, 3)), np.zeros((0, 3))
    a = np.stack([s.a for s in segments])
    b = np.stack([s.b for s in segments])
    return a, b
