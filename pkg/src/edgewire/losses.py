"""Set-prediction losses over matched edges and their analytic gradients.

Predictions are held in a :class:`PredictionSet` of parallel arrays.  The
five loss terms are

* ``mid``  - mean l1 midpoint error over matched pairs,
* ``comp`` - mean l1 error of the per-axis absolute components,
* ``con``  - binary cross-entropy of confidences against (soft) targets,
  averaged over *all* predictions,
* ``quad`` - 4-way cross-entropy of the quadrant logits over matched pairs,
* ``sim``  - mean edge similarity over matched pairs,

and the total is their weighted sum.  Gradients are taken with the matching
held fixed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .errors import InvalidArgument, InvalidEdge
from .geometry import (
    QUADRANT_SIGNS,
    ParamEdge,
    Segment,
    canonical_quadrant,
    segments_to_arrays,
)
from .matching import (
    MatchResult,
    SoftLabels,
    hard_confidence_labels,
    match_edges,
    soft_confidence_labels,
)
from .similarity import SimilarityWeights, similarity_and_grad, similarity_pairs

logger = logging.getLogger(__name__)

CONF_EPS = 1e-7
DEFAULT_LOGIT_MARGIN = 20.0


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logit(p, eps: float = 1e-12):
    p = np.clip(np.asarray(p, dtype=float), eps, 1.0 - eps)
    return np.log(p) - np.log1p(-p)


def log_softmax(x: np.ndarray) -> np.ndarray:
    x = x - x.max(axis=-1, keepdims=True)
    return x - np.log(np.exp(x).sum(axis=-1, keepdims=True))


@dataclass(frozen=True)
class LossWeights:
    lambda_mid: float = 1.0
    lambda_comp: float = 1.0
    lambda_con: float = 1.0
    lambda_quad: float = 1.0
    lambda_sim: float = 1.0

    def __post_init__(self):
        for name in ("lambda_mid", "lambda_comp", "lambda_con", "lambda_quad", "lambda_sim"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidArgument(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class LossBreakdown:
    mid: float
    comp: float
    con: float
    quad: float
    sim: float
    total: float
    n_pos: int = 0

    @property
    def no_positives(self) -> bool:
        return self.n_pos == 0

    def as_dict(self) -> dict:
        return {
            "comp": self.comp,
            "con": self.con,
            "mid": self.mid,
            "n_pos": self.n_pos,
            "quad": self.quad,
            "sim": self.sim,
            "total": self.total,
        }


class PredictionSet:
    """``M`` predicted edges as parallel arrays.

    Attributes
    ----------
    midpoints, comps : (M, 3) arrays
    confidences : (M,) array of probabilities
    quadrant_logits : (M, 4) array; the decoded quadrant is the arg-max
        (lowest index on ties).
    """

    def __init__(self, midpoints, comps, confidences, quadrant_logits):
        self.midpoints = np.array(midpoints, dtype=float).reshape(-1, 3)
        self.comps = np.array(comps, dtype=float).reshape(-1, 3)
        self.confidences = np.array(confidences, dtype=float).reshape(-1)
        self.quadrant_logits = np.array(quadrant_logits, dtype=float).reshape(-1, 4)
        m = len(self.midpoints)
        if not (len(self.comps) == len(self.confidences) == len(self.quadrant_logits) == m):
            raise InvalidArgument("prediction arrays disagree in length")
        if np.any(self.comps < 0):
            raise InvalidArgument("components must be non-negative")
        if np.any((self.confidences < 0) | (self.confidences > 1)):
            raise InvalidArgument("confidences must lie in [0, 1]")
        for arr in (self.midpoints, self.comps, self.quadrant_logits):
            if not np.all(np.isfinite(arr)):
                raise InvalidArgument("prediction arrays must be finite")

    @classmethod
    def from_edges(cls, edges: Sequence[ParamEdge], quadrant_logits=None,
                   margin: float = DEFAULT_LOGIT_MARGIN) -> "PredictionSet":
        """Build from :class:`ParamEdge` objects.

        Without explicit logits, each edge gets ``margin`` on its own quadrant
        and 0 elsewhere.
        """
        n = len(edges)
        if quadrant_logits is None:
            quadrant_logits = np.zeros((n, 4))
            for k, e in enumerate(edges):
                quadrant_logits[k, e.quadrant] = margin
        return cls(
            [e.midpoint for e in edges] if n else np.zeros((0, 3)),
            [e.comp for e in edges] if n else np.zeros((0, 3)),
            [e.confidence for e in edges],
            quadrant_logits,
        )

    @classmethod
    def from_segments(cls, segments: Sequence[Segment], confidences=None,
                      margin: float = DEFAULT_LOGIT_MARGIN) -> "PredictionSet":
        from .geometry import params_from_segment

        edges = [params_from_segment(s) for s in segments]
        ps = cls.from_edges(edges, margin=margin)
        if confidences is not None:
            ps.confidences = np.array(confidences, dtype=float).reshape(-1)
        return ps

    def __len__(self):
        return len(self.midpoints)

    @property
    def quadrants(self) -> np.ndarray:
        return np.argmax(self.quadrant_logits, axis=1)

    @property
    def edges(self) -> List[ParamEdge]:
        return [
            ParamEdge(m, c, int(q), float(p))
            for m, c, q, p in zip(self.midpoints, self.comps, self.quadrants, self.confidences)
        ]

    def endpoints(self):
        """(a, b) arrays of shape (M, 3) with ``a = mid + v/2``, ``b = mid - v/2``."""
        half = QUADRANT_SIGNS[self.quadrants] * self.comps / 2.0
        return self.midpoints + half, self.midpoints - half

    def check_valid(self) -> None:
        bad = np.flatnonzero(~np.any(self.comps > 0, axis=1))
        if bad.size:
            raise InvalidEdge(f"predicted edges {bad.tolist()} have all-zero components")

    def segments(self) -> List[Segment]:
        self.check_valid()
        a, b = self.endpoints()
        return [Segment(x, y) for x, y in zip(a, b)]

    def subset(self, idx) -> "PredictionSet":
        idx = np.asarray(idx, dtype=int)
        return PredictionSet(
            self.midpoints[idx], self.comps[idx], self.confidences[idx], self.quadrant_logits[idx]
        )

    def copy(self) -> "PredictionSet":
        return self.subset(np.arange(len(self)))


@dataclass
class PredictionGrad:
    """Gradients with the same layout as :class:`PredictionSet`; confidence is
    differentiated through its logit."""

    midpoints: np.ndarray
    comps: np.ndarray
    conf_logits: np.ndarray
    quadrant_logits: np.ndarray

    def flat(self) -> np.ndarray:
        return np.concatenate(
            [self.midpoints.ravel(), self.comps.ravel(), self.conf_logits.ravel(),
             self.quadrant_logits.ravel()]
        )

    def norm(self) -> float:
        return float(np.linalg.norm(self.flat()))


def _gt_arrays(gts: Sequence[Segment]):
    ga, gb = segments_to_arrays(gts)
    if len(ga) and np.any(np.all(ga == gb, axis=1)):
        raise InvalidEdge("degenerate ground-truth segment")
    mids = (ga + gb) / 2.0
    comps = np.abs(ga - gb)
    quads = np.array([canonical_quadrant(a - b)[0] for a, b in zip(ga, gb)], dtype=int)
    return ga, gb, mids, comps, quads


def _check_match(match: MatchResult, n_preds: int, n_gts: int) -> None:
    for i, j, _ in match.pairs:
        if not (0 <= i < n_preds and 0 <= j < n_gts):
            raise InvalidArgument(f"match pair ({i}, {j}) out of range")


def loss_midpoint(preds: PredictionSet, gts: Sequence[Segment], match: MatchResult) -> float:
    _check_match(match, len(preds), len(gts))
    if match.n_pos == 0:
        logger.debug("no positive predictions; midpoint loss is 0")
        return 0.0
    pi, gi = match.pred_indices(), match.gt_indices()
    _, _, gmid, _, _ = _gt_arrays(gts)
    return float(np.abs(preds.midpoints[pi] - gmid[gi]).sum() / match.n_pos)


def loss_component(preds: PredictionSet, gts: Sequence[Segment], match: MatchResult) -> float:
    _check_match(match, len(preds), len(gts))
    if match.n_pos == 0:
        logger.debug("no positive predictions; component loss is 0")
        return 0.0
    pi, gi = match.pred_indices(), match.gt_indices()
    _, _, _, gcomp, _ = _gt_arrays(gts)
    return float(np.abs(preds.comps[pi] - gcomp[gi]).sum() / match.n_pos)


def loss_confidence(preds: PredictionSet, labels: SoftLabels) -> float:
    g = np.asarray(labels.g_con, dtype=float)
    if len(g) != len(preds):
        raise InvalidArgument("one confidence label per prediction required")
    if len(g) == 0:
        return 0.0
    c = np.clip(preds.confidences, CONF_EPS, 1.0 - CONF_EPS)
    return float(np.mean(-(g * np.log(c) + (1.0 - g) * np.log1p(-c))))


def loss_quadrant(preds: PredictionSet, gts: Sequence[Segment], match: MatchResult) -> float:
    _check_match(match, len(preds), len(gts))
    if match.n_pos == 0:
        logger.debug("no positive predictions; quadrant loss is 0")
        return 0.0
    pi, gi = match.pred_indices(), match.gt_indices()
    _, _, _, _, gquad = _gt_arrays(gts)
    logp = log_softmax(preds.quadrant_logits[pi])
    return float(-logp[np.arange(len(pi)), gquad[gi]].mean())


def loss_similarity(
    pred_segments: Sequence[Segment],
    gts: Sequence[Segment],
    match: MatchResult,
    w: SimilarityWeights = SimilarityWeights(),
) -> float:
    _check_match(match, len(pred_segments), len(gts))
    if match.n_pos == 0:
        logger.debug("no positive predictions; similarity loss is 0")
        return 0.0
    pa, pb = segments_to_arrays([pred_segments[i] for i, _, _ in match.pairs])
    ga, gb = segments_to_arrays([gts[j] for _, j, _ in match.pairs])
    return float(np.mean(similarity_pairs(pa, pb, ga, gb, w)))


def loss_and_grad(
    preds: PredictionSet,
    gts: Sequence[Segment],
    match: MatchResult,
    w: SimilarityWeights = SimilarityWeights(),
    lw: LossWeights = LossWeights(),
    labels: str = "soft",
    detach_labels: bool = False,
):
    """Loss breakdown and gradient for a fixed matching.

    With ``labels="soft"`` the confidence targets depend on the current
    geometry of matched edges.  ``detach_labels=True`` treats those targets as
    constants, which is what an optimizer wants; the default differentiates
    through them so the result agrees with finite differences.
    """
    if labels not in ("soft", "hard"):
        raise InvalidArgument(f"labels must be 'soft' or 'hard', got {labels!r}")
    preds.check_valid()
    M = len(preds)
    _check_match(match, M, len(gts))
    ga, gb, gmid, gcomp, gquad = _gt_arrays(gts)
    pi, gi = match.pred_indices(), match.gt_indices()
    npos = len(pi)

    g_mid = np.zeros((M, 3))
    g_comp = np.zeros((M, 3))
    g_logit = np.zeros(M)
    g_quad = np.zeros((M, 4))
    g_a = np.zeros((M, 3))
    g_b = np.zeros((M, 3))

    L_mid = L_comp = L_quad = L_sim = 0.0
    g_con = np.zeros(M)
    sims = np.zeros(0)
    if npos:
        diff = preds.midpoints[pi] - gmid[gi]
        L_mid = np.abs(diff).sum() / npos
        g_mid[pi] += lw.lambda_mid * np.sign(diff) / npos

        diff = preds.comps[pi] - gcomp[gi]
        L_comp = np.abs(diff).sum() / npos
        g_comp[pi] += lw.lambda_comp * np.sign(diff) / npos

        logp = log_softmax(preds.quadrant_logits[pi])
        rows = np.arange(npos)
        L_quad = -logp[rows, gquad[gi]].mean()
        soft = np.exp(logp)
        soft[rows, gquad[gi]] -= 1.0
        g_quad[pi] += lw.lambda_quad * soft / npos

        pa, pb = preds.endpoints()
        sims, d_a, d_b = similarity_and_grad(pa[pi], pb[pi], ga[gi], gb[gi], w)
        L_sim = sims.mean()
        coef = np.full(npos, lw.lambda_sim / npos)

        if labels == "soft":
            g_con[pi] = np.where(sims < 1.0, 1.0 - sims, 0.0)
        else:
            g_con[pi] = 1.0

    c = np.clip(preds.confidences, CONF_EPS, 1.0 - CONF_EPS)
    L_con = float(np.mean(-(g_con * np.log(c) + (1.0 - g_con) * np.log1p(-c)))) if M else 0.0
    inside = (preds.confidences > CONF_EPS) & (preds.confidences < 1.0 - CONF_EPS)
    g_logit += lw.lambda_con * np.where(inside, preds.confidences - g_con, 0.0) / M

    if npos:
        if labels == "soft" and not detach_labels:
            # dL_con/dg = (log(1-c) - log c) / M and dg/dsim = -1 while sim < 1
            c_pos = c[pi]
            dl_dg = (np.log1p(-c_pos) - np.log(c_pos)) / M
            coef += np.where(sims < 1.0, -lw.lambda_con * dl_dg, 0.0)
        g_a[pi] += coef[:, None] * d_a
        g_b[pi] += coef[:, None] * d_b

    # a = mid + u*comp/2, b = mid - u*comp/2
    signs = QUADRANT_SIGNS[preds.quadrants]
    g_mid += g_a + g_b
    g_comp += signs * (g_a - g_b) / 2.0

    total = (
        lw.lambda_mid * L_mid
        + lw.lambda_comp * L_comp
        + lw.lambda_con * L_con
        + lw.lambda_quad * L_quad
        + lw.lambda_sim * L_sim
    )
    breakdown = LossBreakdown(
        float(L_mid), float(L_comp), float(L_con), float(L_quad), float(L_sim),
        float(total), npos,
    )
    return breakdown, PredictionGrad(g_mid, g_comp, g_logit, g_quad)


def total_loss(
    preds: PredictionSet,
    gts: Sequence[Segment],
    w: SimilarityWeights = SimilarityWeights(),
    lw: LossWeights = LossWeights(),
    match: Optional[MatchResult] = None,
    labels: str = "soft",
) -> LossBreakdown:
    """Weighted sum of the five loss terms; matches edges first unless given ``match``."""
    if match is None:
        match = match_edges(preds.segments(), gts, w)
    return loss_and_grad(preds, gts, match, w, lw, labels=labels)[0]


def grad_total_loss(
    preds: PredictionSet,
    gts: Sequence[Segment],
    w: SimilarityWeights = SimilarityWeights(),
    lw: LossWeights = LossWeights(),
    match: Optional[MatchResult] = None,
    labels: str = "soft",
    detach_labels: bool = False,
) -> PredictionGrad:
    if match is None:
        match = match_edges(preds.segments(), gts, w)
    return loss_and_grad(preds, gts, match, w, lw, labels=labels, detach_labels=detach_labels)[1]


def confidence_labels(preds: PredictionSet, gts: Sequence[Segment], match: MatchResult,
                      w: SimilarityWeights = SimilarityWeights(), labels: str = "soft") -> SoftLabels:
    """Soft or hard confidence targets for the current geometry."""
    if labels == "hard":
        return hard_confidence_labels(len(preds), match)
    segs = preds.segments()
    sims = np.full((len(preds), len(gts)), np.inf)
    for i, j, _ in match.pairs:
        sims[i, j] = similarity_pairs(segs[i].a, segs[i].b, gts[j].a, gts[j].b, w)
    return soft_confidence_labels(segs, gts, match, sims)
