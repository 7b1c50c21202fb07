"""Direct optimization of edge predictions against a ground-truth wireframe.

This stands in for a trained network: ``M`` query edges are seeded by
farthest point sampling over the point cloud and then moved by plain
gradient descent on the set-prediction loss.  The matching is recomputed
every ``rematch_every`` steps and frozen in between.  Unmatched queries only
ever see the confidence gradient (towards 0).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import InvalidArgument
from .geometry import PointCloud, Wireframe, farthest_point_sampling
from .losses import LossWeights, PredictionSet, loss_and_grad, logit, sigmoid
from .matching import match_edges
from .similarity import SimilarityWeights, similarity_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitConfig:
    num_queries: int = 128
    iterations: int = 3000
    step_size: float = 0.1
    rematch_every: int = 10
    conf_threshold: float = 0.7
    nms_threshold: float = 0.5
    init_length: float = 1.0
    seed: int = 0
    labels: str = "soft"
    # halve the step this many times over the run (0 keeps it fixed)
    step_halvings: int = 3

    def __post_init__(self):
        if self.num_queries < 1:
            raise InvalidArgument("num_queries must be >= 1")
        if self.iterations < 1:
            raise InvalidArgument("iterations must be >= 1")
        if self.rematch_every < 1:
            raise InvalidArgument("rematch_every must be >= 1")
        if not self.step_size > 0:
            raise InvalidArgument("step_size must be > 0")
        if not 0.0 <= self.conf_threshold <= 1.0:
            raise InvalidArgument("conf_threshold must be in [0, 1]")
        if not self.nms_threshold > 0:
            raise InvalidArgument("nms_threshold must be > 0")
        if not self.init_length > 0:
            raise InvalidArgument("init_length must be > 0")
        if self.labels not in ("soft", "hard"):
            raise InvalidArgument("labels must be 'soft' or 'hard'")
        if self.step_halvings < 0:
            raise InvalidArgument("step_halvings must be >= 0")


def init_queries(cloud: PointCloud, cfg: FitConfig) -> PredictionSet:
    """``M`` initial edges centred on farthest-point samples of the cloud.

    Each edge points roughly along +x with length ``init_length``; every
    component gets seeded noise of ``0.1 * init_length`` and is then made
    non-negative.  Confidence starts at 0.5 and quadrant logits at zero.
    """
    M = cfg.num_queries
    if len(cloud) < M:
        raise InvalidArgument(f"cloud has {len(cloud)} points, fewer than {M} queries")
    mids = farthest_point_sampling(cloud, M)
    rng = np.random.default_rng(cfg.seed)
    base = np.array([cfg.init_length, 0.0, 0.0])
    comps = np.abs(base + rng.normal(0.0, 0.1 * cfg.init_length, (M, 3)))
    return PredictionSet(mids, comps, np.full(M, 0.5), np.zeros((M, 4)))


def _step_size(cfg: FitConfig, it: int) -> float:
    if cfg.step_halvings == 0:
        return cfg.step_size
    period = max(1, cfg.iterations // (cfg.step_halvings + 1))
    return cfg.step_size * 0.5 ** min(it // period, cfg.step_halvings)


def fit(
    cloud: Optional[PointCloud],
    gt: Wireframe,
    cfg: FitConfig = FitConfig(),
    w: SimilarityWeights = SimilarityWeights(),
    lw: LossWeights = LossWeights(),
    init: Optional[PredictionSet] = None,
) -> Tuple[PredictionSet, List[float]]:
    """Fit predictions to ``gt``; returns final predictions and the loss trace.

    ``trace[k]`` is the total loss evaluated before update ``k``; the final
    entry is the loss of the returned predictions.
    """
    gts = gt.segments()
    if not gts:
        raise InvalidArgument("ground truth has no edges")
    preds = init if init is not None else init_queries(cloud, cfg)
    if len(preds) < len(gts):
        raise InvalidArgument(f"{len(preds)} queries cannot cover {len(gts)} edges")

    mids = preds.midpoints.copy()
    comps = preds.comps.copy()
    z = logit(preds.confidences)
    qlog = preds.quadrant_logits.copy()

    def current():
        return PredictionSet(mids, comps, sigmoid(z), qlog)

    trace: List[float] = []
    match = None
    for it in range(cfg.iterations):
        state = current()
        if it % cfg.rematch_every == 0:
            match = match_edges(state.segments(), gts, w)
        breakdown, grad = loss_and_grad(
            state, gts, match, w, lw, labels=cfg.labels, detach_labels=True
        )
        trace.append(breakdown.total)
        step = _step_size(cfg, it)
        mids -= step * grad.midpoints
        comps -= step * grad.comps
        np.maximum(comps, 0.0, out=comps)
        dead = ~np.any(comps > 0, axis=1)
        if np.any(dead):
            comps[dead] = 1e-6
        z -= step * grad.conf_logits
        qlog -= step * grad.quadrant_logits

    final = current()
    match = match_edges(final.segments(), gts, w)
    trace.append(loss_and_grad(final, gts, match, w, lw, labels=cfg.labels)[0].total)
    logger.info("fit: loss %.4f -> %.4f over %d iterations", trace[0], trace[-1], cfg.iterations)
    return final, trace


def filter_by_confidence(preds: PredictionSet, threshold: float) -> PredictionSet:
    """Keep predictions with confidence >= ``threshold``, in their original order."""
    if not 0.0 <= threshold <= 1.0:
        raise InvalidArgument(f"threshold must be in [0, 1], got {threshold}")
    return preds.subset(np.flatnonzero(preds.confidences >= threshold))


def edge_nms(preds: PredictionSet, w: SimilarityWeights = SimilarityWeights(),
             tau: float = 0.5) -> PredictionSet:
    """Greedy edge non-maximum suppression.

    Edges are visited by descending confidence (lower index first on ties).
    An edge survives only if its similarity to every survivor so far exceeds
    ``tau``; since similarity is a dissimilarity score, anything closer than
    ``tau`` to a better edge is dropped.  Output is in visiting order.
    """
    if not tau > 0:
        raise InvalidArgument(f"tau must be > 0, got {tau}")
    if len(preds) == 0:
        return preds.copy()
    order = np.lexsort((np.arange(len(preds)), -preds.confidences))
    segs = preds.segments()
    sims = similarity_matrix(segs, segs, w)
    kept: List[int] = []
    for i in order:
        if all(sims[i, k] > tau for k in kept):
            kept.append(int(i))
    return preds.subset(kept)
