"""Minimum-cost bipartite assignment of predicted edges to ground-truth edges."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidArgument
from .geometry import Segment
from .similarity import SimilarityWeights, similarity_matrix


@dataclass(frozen=True)
class MatchResult:
    """Injective pred -> gt assignment.

    ``pairs`` holds ``(pred_index, gt_index, cost)`` sorted by pred index.
    """

    pairs: List[Tuple[int, int, float]]
    unmatched_preds: List[int] = field(default_factory=list)
    unmatched_gts: List[int] = field(default_factory=list)

    @property
    def n_pos(self) -> int:
        return len(self.pairs)

    @property
    def total_cost(self) -> float:
        return math.fsum(c for _, _, c in self.pairs)

    def pred_indices(self) -> np.ndarray:
        return np.array([i for i, _, _ in self.pairs], dtype=int)

    def gt_indices(self) -> np.ndarray:
        return np.array([j for _, j, _ in self.pairs], dtype=int)


@dataclass(frozen=True)
class SoftLabels:
    g_con: np.ndarray


def _optimal_total(cost: np.ndarray) -> float:
    if cost.shape[0] == 0 or cost.shape[1] == 0:
        return 0.0
    r, c = linear_sum_assignment(cost)
    return math.fsum(cost[r, c])


def hungarian_assign(cost) -> MatchResult:
    """Minimum total-cost assignment matching every row or every column.

    The smaller side is matched completely.  Among optimal assignments the
    lexicographically smallest pair list (sorted by row) is returned: rows
    are decided in order, each taking the lowest column that still admits an
    optimal completion.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2:
        raise InvalidArgument(f"cost must be a 2-D matrix, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise InvalidArgument("cost matrix contains non-finite entries")
    n_rows, n_cols = cost.shape
    if n_rows == 0 or n_cols == 0:
        return MatchResult([], list(range(n_rows)), list(range(n_cols)))

    best = _optimal_total(cost)
    tol = 1e-12 * max(1.0, math.fsum(np.abs(cost).max(axis=1 if n_rows <= n_cols else 0)))
    n_match = min(n_rows, n_cols)

    free_rows = list(range(n_rows))
    free_cols = list(range(n_cols))
    fixed = 0.0
    pairs: List[Tuple[int, int, float]] = []
    for i in range(n_rows):
        if len(pairs) == n_match:
            break
        free_rows.remove(i)
        rows_left = len(free_rows)
        chosen = None
        for j in free_cols:
            # every remaining column still needs a row when cols are the smaller side
            cols_left = len(free_cols) - 1
            if n_rows > n_cols and rows_left < cols_left:
                continue
            sub = cost[np.ix_(free_rows, [c for c in free_cols if c != j])]
            total = fixed + cost[i, j] + _optimal_total(sub)
            if total <= best + tol:
                chosen = j
                break
        if chosen is None:
            continue  # row i stays unmatched
        pairs.append((i, chosen, float(cost[i, chosen])))
        fixed += cost[i, chosen]
        free_cols.remove(chosen)

    matched_rows = {i for i, _, _ in pairs}
    matched_cols = {j for _, j, _ in pairs}
    return MatchResult(
        pairs,
        [i for i in range(n_rows) if i not in matched_rows],
        [j for j in range(n_cols) if j not in matched_cols],
    )


def match_edges(
    preds: Sequence[Segment],
    gts: Sequence[Segment],
    w: SimilarityWeights = SimilarityWeights(),
) -> MatchResult:
    return hungarian_assign(similarity_matrix(preds, gts, w))


def soft_confidence_labels(
    preds: Sequence[Segment],
    gts: Sequence[Segment],
    match: MatchResult,
    sims: np.ndarray,
) -> SoftLabels:
    """Confidence targets ``1 - sim`` for matched preds (0 when sim >= 1 or unmatched)."""
    sims = np.asarray(sims, dtype=float)
    g = np.zeros(len(preds))
    for i, j, _ in match.pairs:
        if not (0 <= i < len(preds) and 0 <= j < len(gts)):
            raise InvalidArgument(f"pair ({i}, {j}) out of range")
        if i >= sims.shape[0] or j >= sims.shape[1]:
            raise InvalidArgument(f"pair ({i}, {j}) outside similarity matrix {sims.shape}")
        s = sims[i, j]
        g[i] = 1.0 - s if s < 1.0 else 0.0
    return SoftLabels(g)


def hard_confidence_labels(n_preds: int, match: MatchResult) -> SoftLabels:
    """Binary targets: 1 for every matched prediction, 0 otherwise."""
    g = np.zeros(n_preds)
    for i, _, _ in match.pairs:
        if not 0 <= i < n_preds:
            raise InvalidArgument(f"pred index {i} out of range")
        g[i] = 1.0
    return SoftLabels(g)
