"""Corner and edge accuracy of a predicted wireframe against ground truth."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import List, Tuple

import numpy as np

from .errors import InvalidArgument
from .geometry import Wireframe
from .matching import hungarian_assign


@dataclass(frozen=True)
class EvalConfig:
    corner_match_threshold: float = 0.1

    def __post_init__(self):
        if not self.corner_match_threshold > 0:
            raise InvalidArgument("corner_match_threshold must be > 0")


@dataclass(frozen=True)
class EvalReport:
    aco: float
    cp: float
    cr: float
    cf1: float
    ep: float
    er: float
    ef1: float
    matched_corners: int
    matched_edges: int

    def as_dict(self) -> dict:
        return asdict(self)


def f1(p: float, r: float) -> float:
    return 2.0 * p * r / (p + r) if p + r > 0 else 0.0


def match_corners(
    pred: Wireframe, gt: Wireframe, cfg: EvalConfig = EvalConfig()
) -> List[Tuple[int, int, float]]:
    """Minimum-total-distance corner assignment, minus pairs beyond the threshold."""
    if pred.num_vertices == 0 or gt.num_vertices == 0:
        return []
    dist = np.linalg.norm(pred.vertices[:, None, :] - gt.vertices[None, :, :], axis=-1)
    assignment = hungarian_assign(dist)
    return [(i, j, d) for i, j, d in assignment.pairs if d <= cfg.corner_match_threshold]


def evaluate(pred: Wireframe, gt: Wireframe, cfg: EvalConfig = EvalConfig()) -> EvalReport:
    corners = match_corners(pred, gt, cfg)
    n_corners = len(corners)
    aco = float(np.mean([d for _, _, d in corners])) if corners else 0.0
    cp = n_corners / pred.num_vertices if pred.num_vertices else 0.0
    cr = n_corners / gt.num_vertices if gt.num_vertices else 0.0

    to_gt = {i: j for i, j, _ in corners}
    gt_edges = gt.edge_keys()
    hit = set()
    for u, v in pred.edge_keys():
        if u in to_gt and v in to_gt:
            key = (min(to_gt[u], to_gt[v]), max(to_gt[u], to_gt[v]))
            if key in gt_edges:
                hit.add(key)
    n_edges = len(hit)
    ep = n_edges / len(pred.edges) if pred.edges else 0.0
    er = n_edges / len(gt.edges) if gt.edges else 0.0
    return EvalReport(aco, cp, cr, f1(cp, cr), ep, er, f1(ep, er), n_corners, n_edges)
