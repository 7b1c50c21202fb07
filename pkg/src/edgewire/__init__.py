"""Parametric 3D edge regression toolkit: edge encoding, similarity matching,
set-prediction losses, edge NMS and wireframe evaluation."""

from .assembly import DbscanParams, assemble_wireframe, dbscan_cluster
from .errors import InvalidArgument, InvalidEdge, ParseError
from .fitter import FitConfig, edge_nms, filter_by_confidence, fit, init_queries
from .geometry import (
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
from .losses import (
    LossBreakdown,
    LossWeights,
    PredictionSet,
    grad_total_loss,
    loss_component,
    loss_confidence,
    loss_midpoint,
    loss_quadrant,
    loss_similarity,
    total_loss,
)
from .matching import MatchResult, SoftLabels, hungarian_assign, match_edges, soft_confidence_labels
from .metrics import EvalConfig, EvalReport, evaluate, match_corners
from .similarity import (
    SimilarityWeights,
    direction_similarity,
    edge_similarity,
    hausdorff_distance,
    length_similarity,
    similarity_matrix,
)
from .synthetic import RoofSpec, augment, generate_roof, perturb_wireframe

__version__ = "0.1.0"
