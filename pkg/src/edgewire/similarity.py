"""Edge-to-edge distance and similarity measures.

All measures are 0 for identical edges and grow as edges differ:

* sampled Hausdorff distance (input units),
* direction dissimilarity ``1 - |cos|`` in [0, 1],
* length dissimilarity ``1 - min/max`` in [0, 1),

combined as a weighted sum.  The array helpers at the bottom evaluate many
edge pairs at once and also return the (sub)gradient with respect to the
first edge's endpoints, which the loss stack needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, InvalidEdge
from .geometry import Segment, closest_on_segments, segments_to_arrays

# Below this a distance counts as zero for subgradient purposes.
_ZERO_DIST = 1e-12


@dataclass(frozen=True)
class SimilarityWeights:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    samples_per_edge: int = 64

    def __post_init__(self):
        ws = (self.alpha, self.beta, self.gamma)
        if any(not np.isfinite(x) or x < 0 for x in ws):
            raise InvalidArgument(f"weights must be finite and non-negative, got {ws}")
        if sum(ws) <= 0:
            raise InvalidArgument("at least one similarity weight must be positive")
        if int(self.samples_per_edge) < 2:
            raise InvalidArgument(
                f"samples_per_edge must be >= 2, got {self.samples_per_edge}"
            )


def _lengths(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    lengths = np.linalg.norm(a - b, axis=-1)
    if np.any(lengths == 0):
        raise InvalidEdge("degenerate segment in similarity computation")
    return lengths


def _coincident(ai, bi, aj, bj) -> np.ndarray:
    """True where two edges have exactly the same endpoints (either order)."""
    same = np.all(ai == aj, axis=-1) & np.all(bi == bj, axis=-1)
    return same | (np.all(ai == bj, axis=-1) & np.all(bi == aj, axis=-1))


def _directed_hausdorff(src_a, src_b, dst_a, dst_b, K):
    """Max over K samples of the source edge of the distance to the target edge.

    Returns ``(h, k, s, q, dist_vectors)`` with the arg-max sample index ``k``.
    """
    t = np.linspace(0.0, 1.0, K)
    samples = (1.0 - t)[:, None] * src_a[..., None, :] + t[:, None] * src_b[..., None, :]
    dist, s, q = closest_on_segments(samples, dst_a[..., None, :], dst_b[..., None, :])
    k = np.argmax(dist, axis=-1)
    h = np.take_along_axis(dist, k[..., None], axis=-1)[..., 0]
    return h, k, t, samples, s, q


def hausdorff_pairs(ai, bi, aj, bj, K: int) -> np.ndarray:
    """Symmetric sampled Hausdorff distance for broadcast edge arrays."""
    _lengths(ai, bi)
    _lengths(aj, bj)
    h_ij = _directed_hausdorff(ai, bi, aj, bj, K)[0]
    h_ji = _directed_hausdorff(aj, bj, ai, bi, K)[0]
    return np.where(_coincident(ai, bi, aj, bj), 0.0, np.maximum(h_ij, h_ji))


def direction_pairs(ai, bi, aj, bj) -> np.ndarray:
    di = ai - bi
    dj = aj - bj
    cos = np.sum(di * dj, axis=-1) / (_lengths(ai, bi) * _lengths(aj, bj))
    dir_sim = np.clip(1.0 - np.abs(cos), 0.0, 1.0)
    return np.where(_coincident(ai, bi, aj, bj), 0.0, dir_sim)


def length_pairs(ai, bi, aj, bj) -> np.ndarray:
    li = _lengths(ai, bi)
    lj = _lengths(aj, bj)
    return 1.0 - np.minimum(li, lj) / np.maximum(li, lj)


def similarity_pairs(ai, bi, aj, bj, w: SimilarityWeights) -> np.ndarray:
    return (
        w.alpha * hausdorff_pairs(ai, bi, aj, bj, w.samples_per_edge)
        + w.beta * direction_pairs(ai, bi, aj, bj)
        + w.gamma * length_pairs(ai, bi, aj, bj)
    )


def hausdorff_distance(e_i: Segment, e_j: Segment, K: int = 64) -> float:
    """Hausdorff distance between two segments.

    Each direction samples ``K`` points uniformly on the source edge and
    measures the exact distance from each sample to the continuous target
    segment.
    """
    if K < 2:
        raise InvalidArgument(f"K must be >= 2, got {K}")
    return float(hausdorff_pairs(e_i.a, e_i.b, e_j.a, e_j.b, K))


def direction_similarity(e_i: Segment, e_j: Segment) -> float:
    return float(direction_pairs(e_i.a, e_i.b, e_j.a, e_j.b))


def length_similarity(e_i: Segment, e_j: Segment) -> float:
    return float(length_pairs(e_i.a, e_i.b, e_j.a, e_j.b))


def edge_similarity(e_i: Segment, e_j: Segment, w: SimilarityWeights = SimilarityWeights()) -> float:
    return float(similarity_pairs(e_i.a, e_i.b, e_j.a, e_j.b, w))


def similarity_matrix(
    preds: Sequence[Segment],
    gts: Sequence[Segment],
    w: SimilarityWeights = SimilarityWeights(),
) -> np.ndarray:
    """``(len(preds), len(gts))`` matrix of :func:`edge_similarity` values."""
    if len(preds) == 0 or len(gts) == 0:
        raise InvalidArgument("similarity_matrix needs non-empty edge lists")
    pa, pb = segments_to_arrays(preds)
    ga, gb = segments_to_arrays(gts)
    return similarity_pairs(pa[:, None], pb[:, None], ga[None], gb[None], w)


def similarity_and_grad(ai, bi, aj, bj, w: SimilarityWeights):
    """Similarity of paired edges ``i`` vs ``j`` and its gradient w.r.t. edge ``i``.

    Inputs are ``(P, 3)`` arrays of matched pairs.  Returns ``(sim, d_ai, d_bi)``.
    At non-smooth points a valid subgradient is returned: the arg-max sample
    of the Hausdorff term (first index on ties), zero for a zero distance and
    zero at equal lengths.
    """
    K = w.samples_per_edge
    li = _lengths(ai, bi)
    lj = _lengths(aj, bj)
    di = ai - bi
    dj = aj - bj

    # Hausdorff term
    h_ij, k_ij, t, samples_i, _, q_ij = _directed_hausdorff(ai, bi, aj, bj, K)
    h_ji, k_ji, _, samples_j, s_ji, q_ji = _directed_hausdorff(aj, bj, ai, bi, K)
    rows = np.arange(len(ai))
    grad_a_h = np.zeros_like(ai)
    grad_b_h = np.zeros_like(ai)

    fwd = h_ij >= h_ji
    if np.any(fwd):
        r, k = rows[fwd], k_ij[fwd]
        vec = samples_i[r, k] - q_ij[r, k]
        n = _unit(vec, h_ij[fwd])
        grad_a_h[fwd] = (1.0 - t[k])[:, None] * n
        grad_b_h[fwd] = t[k][:, None] * n
    bwd = ~fwd
    if np.any(bwd):
        r, k = rows[bwd], k_ji[bwd]
        vec = samples_j[r, k] - q_ji[r, k]
        n = _unit(vec, h_ji[bwd])
        s = s_ji[r, k][:, None]
        grad_a_h[bwd] = -(1.0 - s) * n
        grad_b_h[bwd] = -s * n
    same = _coincident(ai, bi, aj, bj)
    hd = np.where(same, 0.0, np.maximum(h_ij, h_ji))

    # direction term
    cos = np.sum(di * dj, axis=-1) / (li * lj)
    dir_sim = np.where(same, 0.0, np.clip(1.0 - np.abs(cos), 0.0, 1.0))
    grad_d_dir = -np.sign(cos)[:, None] * (
        dj / (li * lj)[:, None] - (cos / li**2)[:, None] * di
    )

    # length term
    shorter = li < lj * (1.0 - 1e-12)
    longer = li > lj * (1.0 + 1e-12)
    len_sim = 1.0 - np.minimum(li, lj) / np.maximum(li, lj)
    unit_i = di / li[:, None]
    coef = np.where(shorter, -1.0 / lj, np.where(longer, lj / li**2, 0.0))
    grad_d_len = coef[:, None] * unit_i

    sim = w.alpha * hd + w.beta * dir_sim + w.gamma * len_sim
    grad_d = w.beta * grad_d_dir + w.gamma * grad_d_len
    # coincident edges sit at the global minimum: zero is a valid subgradient
    keep = ~same[:, None]
    d_ai = np.where(keep, w.alpha * grad_a_h + grad_d, 0.0)
    d_bi = np.where(keep, w.alpha * grad_b_h - grad_d, 0.0)
    return sim, d_ai, d_bi


def _unit(vec: np.ndarray, norm: np.ndarray) -> np.ndarray:
    safe = np.where(norm > _ZERO_DIST, norm, 1.0)
    return np.where((norm > _ZERO_DIST)[:, None], vec / safe[:, None], 0.0)
