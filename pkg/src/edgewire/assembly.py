"""Turning a loose set of predicted segments into a connected wireframe."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import InvalidArgument
from .geometry import Segment, Wireframe, check_segment

logger = logging.getLogger(__name__)

NOISE = -1


@dataclass(frozen=True)
class DbscanParams:
    eps: float = 0.05
    min_points: int = 2

    def __post_init__(self):
        if not self.eps > 0:
            raise InvalidArgument(f"eps must be > 0, got {self.eps}")
        if self.min_points < 1:
            raise InvalidArgument(f"min_points must be >= 1, got {self.min_points}")


def dbscan_cluster(points, params: DbscanParams = DbscanParams()) -> np.ndarray:
    """Density-based clustering; returns one label per point, ``NOISE`` for noise.

    A point is core when at least ``min_points`` points (itself included) lie
    within ``eps``.  Clusters are numbered 0, 1, ... in order of their lowest
    core point; a border point belongs to the first cluster that reaches it.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    n = len(pts)
    if n == 0:
        return np.zeros(0, dtype=int)
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    neighbors = [np.flatnonzero(row <= params.eps) for row in dist]
    core = np.array([len(nb) >= params.min_points for nb in neighbors])

    unvisited = -2
    labels = np.full(n, unvisited, dtype=int)
    cluster = 0
    for i in range(n):
        if labels[i] != unvisited:
            continue
        if not core[i]:
            labels[i] = NOISE
            continue
        labels[i] = cluster
        queue = deque([i])
        while queue:
            q = queue.popleft()
            for nb in neighbors[q]:
                if labels[nb] == NOISE:
                    labels[nb] = cluster
                elif labels[nb] == unvisited:
                    labels[nb] = cluster
                    if core[nb]:
                        queue.append(nb)
        cluster += 1
    return labels


def assemble_wireframe(
    segments: Sequence[Segment],
    params: DbscanParams = DbscanParams(),
) -> Wireframe:
    """Merge nearby endpoints into shared corners and index the edges.

    Clustered endpoints move to their cluster centroid; noise endpoints stay
    where they are.  Edges whose ends collapse onto one vertex are dropped and
    repeated edges are kept once, so no edge is ever added.
    """
    if not segments:
        return Wireframe.empty()
    for s in segments:
        check_segment(s)
    ends = np.empty((2 * len(segments), 3))
    ends[0::2] = [s.a for s in segments]
    ends[1::2] = [s.b for s in segments]

    labels = dbscan_cluster(ends, params)
    placed = ends.copy()
    for c in np.unique(labels[labels != NOISE]):
        members = labels == c
        placed[members] = ends[members].mean(axis=0)

    index: Dict[Tuple[float, ...], int] = {}
    vertices: List[np.ndarray] = []
    vid = np.empty(len(placed), dtype=int)
    for k, p in enumerate(placed):
        key = tuple(p.tolist())
        if key not in index:
            index[key] = len(vertices)
            vertices.append(p)
        vid[k] = index[key]

    edges: List[Tuple[int, int]] = []
    seen = set()
    collapsed = duplicates = 0
    for k in range(len(segments)):
        u, v = int(vid[2 * k]), int(vid[2 * k + 1])
        if u == v:
            collapsed += 1
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        edges.append((u, v))
    if collapsed or duplicates:
        logger.debug("assembly dropped %d collapsed and %d duplicate edges", collapsed, duplicates)

    # vertices used only by collapsed edges are dropped
    used = sorted({i for e in edges for i in e})
    remap = {old: new for new, old in enumerate(used)}
    return Wireframe(
        np.array([vertices[i] for i in used]).reshape(-1, 3),
        [(remap[u], remap[v]) for u, v in edges],
    )
