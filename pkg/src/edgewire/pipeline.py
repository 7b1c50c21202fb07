"""Post-processing chain from raw edge predictions to an evaluated wireframe."""

from __future__ import annotations

from typing import Optional, Tuple

from .assembly import DbscanParams, assemble_wireframe
from .fitter import edge_nms, filter_by_confidence
from .geometry import Wireframe
from .losses import PredictionSet
from .metrics import EvalConfig, EvalReport, evaluate
from .similarity import SimilarityWeights


def postprocess(
    preds: PredictionSet,
    conf_threshold: float = 0.7,
    nms_threshold: float = 0.5,
    w: SimilarityWeights = SimilarityWeights(),
    dbscan: DbscanParams = DbscanParams(),
) -> Wireframe:
    """Confidence filter, E-NMS, then corner merging."""
    kept = edge_nms(filter_by_confidence(preds, conf_threshold), w, nms_threshold)
    if len(kept) == 0:
        return Wireframe.empty()
    return assemble_wireframe(kept.segments(), dbscan)


def reconstruct_and_evaluate(
    preds: PredictionSet,
    gt: Wireframe,
    conf_threshold: float = 0.7,
    nms_threshold: float = 0.5,
    w: SimilarityWeights = SimilarityWeights(),
    dbscan: DbscanParams = DbscanParams(),
    cfg: Optional[EvalConfig] = None,
) -> Tuple[Wireframe, EvalReport]:
    wf = postprocess(preds, conf_threshold, nms_threshold, w, dbscan)
    return wf, evaluate(wf, gt, cfg or EvalConfig())
