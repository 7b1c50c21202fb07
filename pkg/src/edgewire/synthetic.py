"""Synthetic roof fixtures: exact wireframes plus sampled noisy point clouds."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from .errors import InvalidArgument
from .geometry import PointCloud, Segment, Wireframe

ROOF_KINDS = ("flat", "gable", "hip", "l_shaped")
AUGMENT_OPS = ("flip_yz", "flip_xz", "rotate_z")


@dataclass(frozen=True)
class RoofSpec:
    kind: str = "gable"
    width: float = 10.0
    depth: float = 6.0
    eave_height: float = 3.0
    ridge_height: float = 5.0
    point_count: int = 2560
    noise_sigma: float = 0.02
    dropout_fraction: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in ROOF_KINDS:
            raise InvalidArgument(f"unknown roof kind {self.kind!r}; expected one of {ROOF_KINDS}")
        if min(self.width, self.depth) <= 0 or self.eave_height <= 0:
            raise InvalidArgument("roof dimensions must be positive")
        if self.kind in ("gable", "hip") and self.ridge_height < self.eave_height:
            raise InvalidArgument("ridge_height must be >= eave_height for pitched roofs")
        if self.kind == "gable" and self.ridge_height == self.eave_height:
            raise InvalidArgument("gable ridge must sit above the eaves")
        if self.kind == "hip" and not self.width > self.depth:
            raise InvalidArgument("hip roofs need width > depth to have a ridge")
        if self.point_count < 1:
            raise InvalidArgument("point_count must be >= 1")
        if self.noise_sigma < 0:
            raise InvalidArgument("noise_sigma must be >= 0")
        if not 0.0 <= self.dropout_fraction < 1.0:
            raise InvalidArgument("dropout_fraction must be in [0, 1)")

    def with_(self, **kw) -> "RoofSpec":
        return replace(self, **kw)


def _roof_geometry(spec: RoofSpec):
    """Vertices, edges and roof faces (vertex-index polygons)."""
    w, d, e, r = spec.width, spec.depth, spec.eave_height, spec.ridge_height
    eaves = [(0.0, 0.0, e), (w, 0.0, e), (w, d, e), (0.0, d, e)]
    rect = [(0, 1), (1, 2), (2, 3), (3, 0)]
    if spec.kind == "flat":
        return eaves, rect, [[0, 1, 2, 3]]
    if spec.kind == "l_shaped":
        verts = [(0.0, 0.0, e), (w, 0.0, e), (w, d / 2, e), (w / 2, d / 2, e),
                 (w / 2, d, e), (0.0, d, e)]
        edges = [(k, (k + 1) % 6) for k in range(6)]
        return verts, edges, [[0, 1, 2, 3], [0, 3, 4, 5]]
    if spec.kind == "gable":
        ridge = [(0.0, d / 2, r), (w, d / 2, r)]
    else:
        ridge = [(d / 2, d / 2, r), (w - d / 2, d / 2, r)]
    verts = eaves + ridge
    edges = rect + [(4, 5), (0, 4), (3, 4), (1, 5), (2, 5)]
    faces = [[0, 1, 5, 4], [3, 4, 5, 2]]
    if spec.kind == "hip":
        faces += [[0, 4, 3], [1, 2, 5]]
    return verts, edges, faces


def _triangles(verts: np.ndarray, faces) -> np.ndarray:
    tris = [(verts[f[0]], verts[f[k]], verts[f[k + 1]]) for f in faces for k in range(1, len(f) - 1)]
    return np.array(tris)


def roof_faces(spec: RoofSpec) -> np.ndarray:
    """Roof surface as an array of triangles, shape (T, 3, 3)."""
    spec.validate()
    verts, _, faces = _roof_geometry(spec)
    return _triangles(np.array(verts), faces)


def generate_roof(spec: RoofSpec) -> Tuple[PointCloud, Wireframe]:
    """Sample a roof point cloud and return it with the exact roof wireframe.

    Points are drawn uniformly by area over the roof faces, displaced by
    isotropic Gaussian noise (magnitude truncated at 4 sigma), and then a
    ``dropout_fraction`` share of them is removed.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    verts, edges, faces = _roof_geometry(spec)
    verts = np.array(verts)
    tris = _triangles(verts, faces)

    areas = 0.5 * np.linalg.norm(np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0]), axis=1)
    pick = rng.choice(len(tris), size=spec.point_count, p=areas / areas.sum())
    u = rng.random((spec.point_count, 2))
    flip = u.sum(axis=1) > 1.0
    u[flip] = 1.0 - u[flip]
    t = tris[pick]
    pts = t[:, 0] + u[:, :1] * (t[:, 1] - t[:, 0]) + u[:, 1:] * (t[:, 2] - t[:, 0])

    if spec.noise_sigma > 0:
        noise = rng.normal(0.0, spec.noise_sigma, pts.shape)
        norm = np.linalg.norm(noise, axis=1, keepdims=True)
        cap = 4.0 * spec.noise_sigma
        noise = np.where(norm > cap, noise * cap / np.maximum(norm, 1e-300), noise)
        pts = pts + noise

    n_drop = int(np.floor(spec.dropout_fraction * spec.point_count))
    if n_drop:
        keep = np.sort(rng.permutation(spec.point_count)[n_drop:])
        pts = pts[keep]
    return PointCloud(pts), Wireframe(verts, edges)


def _rotation_z(angle_deg: float) -> np.ndarray:
    a = np.deg2rad(angle_deg)
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def augment(
    cloud: PointCloud,
    wf: Wireframe,
    op: str,
    seed: int = 0,
    angle: Optional[float] = None,
) -> Tuple[PointCloud, Wireframe]:
    """Apply one training-time augmentation to cloud and wireframe alike.

    ``flip_yz`` mirrors across the YZ plane (x -> -x), ``flip_xz`` across the
    XZ plane (y -> -y), ``rotate_z`` rotates about the Z axis by ``angle``
    degrees, drawn uniformly from [-5, 5] with ``seed`` when not given.
    """
    if op == "flip_yz":
        mat = np.diag([-1.0, 1.0, 1.0])
    elif op == "flip_xz":
        mat = np.diag([1.0, -1.0, 1.0])
    elif op == "rotate_z":
        if angle is None:
            angle = float(np.random.default_rng(seed).uniform(-5.0, 5.0))
        mat = _rotation_z(angle)
    else:
        raise InvalidArgument(f"unknown augmentation {op!r}; expected one of {AUGMENT_OPS}")
    new_cloud = PointCloud(cloud.points @ mat.T, cloud.attrs)
    new_wf = Wireframe(wf.vertices @ mat.T, wf.edges)
    return new_cloud, new_wf


def perturb_wireframe(wf: Wireframe, sigma: float, seed: int = 0) -> List[Segment]:
    """One segment per wireframe edge with each endpoint jittered by N(0, sigma)."""
    if sigma < 0:
        raise InvalidArgument("sigma must be >= 0")
    rng = np.random.default_rng(seed)
    out = []
    for i, j in wf.edges:
        a = wf.vertices[i] + (rng.normal(0.0, sigma, 3) if sigma > 0 else 0.0)
        b = wf.vertices[j] + (rng.normal(0.0, sigma, 3) if sigma > 0 else 0.0)
        out.append(Segment(a, b))
    return out
