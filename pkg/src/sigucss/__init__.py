"""Offline signature verification from unambiguously connected skeleton segments."""

__version__ = "0.1.0"

from .dtw import WarpResult, dtw_itakura, dtw_min_oriented, dtw_profile
from .encoding import SegmentCode, d2_min_oriented, length_diff, subsample4
from .evaluation import compute_eer, roc_curve, run_roc_experiment, run_table1_experiment
from .features import FeatureStore, extract_features
from .imaging import (BinaryImage, dilate, normalize_points, oversample_spline, rasterize,
                      render_offline, skeletonize)
from .ingest import OnlineSignature, load_catalog, parse_points_file
from .scoring import Enrollment, build_bag, score_fused, score_j, score_length
from .ucss import Ucss, build_graph, extract_segments, reverse, skeleton_segments

__all__ = [
    "BinaryImage", "Enrollment", "FeatureStore", "OnlineSignature", "SegmentCode", "Ucss",
    "WarpResult", "build_bag", "build_graph", "compute_eer", "d2_min_oriented", "dilate",
    "dtw_itakura", "dtw_min_oriented", "dtw_profile", "extract_features", "extract_segments",
    "length_diff", "load_catalog", "normalize_points", "oversample_spline", "parse_points_file",
    "rasterize", "render_offline", "reverse", "run_roc_experiment", "run_table1_experiment",
    "score_fused", "score_j", "score_length", "skeleton_segments", "skeletonize", "subsample4",
]
