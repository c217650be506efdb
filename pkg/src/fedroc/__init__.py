"""Federated ROC and PR curve reconstruction from hierarchical-histogram quantiles."""

from .curves import CurveEstimate, Ecdf, build_ecdf, exact_pr, exact_roc
from .ddp_noise import PrivacyParams, add_noise
from .hier_histogram import HierHistogram, TreeConfig, build_tree, enforce_consistency, height_for
from .interpolation import MonotoneInterpolant, fit
from .metrics import CurveFunction, abs_point_error, area_error, auc_roc, average_precision
from .protocol import ProtocolConfig, RunResult, run
from .quantile_est import QuantileProfile, estimate_quantiles, exact_quantiles
from .score_data import LabeledScores, PartitionSpec, SyntheticSpec, generate, load_csv, partition, subsample_ratio

__version__ = "0.1.0"

__all__ = [
    "CurveEstimate",
    "CurveFunction",
    "Ecdf",
    "HierHistogram",
    "LabeledScores",
    "MonotoneInterpolant",
    "PartitionSpec",
    "PrivacyParams",
    "ProtocolConfig",
    "QuantileProfile",
    "RunResult",
    "SyntheticSpec",
    "TreeConfig",
    "abs_point_error",
    "add_noise",
    "area_error",
    "auc_roc",
    "average_precision",
    "build_ecdf",
    "build_tree",
    "enforce_consistency",
    "estimate_quantiles",
    "exact_pr",
    "exact_quantiles",
    "exact_roc",
    "fit",
    "generate",
    "height_for",
    "load_csv",
    "partition",
    "run",
    "subsample_ratio",
]
