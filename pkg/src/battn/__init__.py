"""Landmark-driven boundary attention maps, plus the losses and metrics used to
train and score fashion landmark/category/attribute predictors."""

from .attention import (
    AttentionConfig,
    AttentionResult,
    Landmark,
    LandmarkSet,
    Visibility,
    apply_attention,
    attention_map,
    build_attention_map,
    concat_channels,
)
from .geometry import ConvexBoundary, Edge, Point, convex_boundary, next_hull_vertex, orientation, select_start
from .losses import HeatmapTargetConfig, LossConfig, asym_weighted_bce, heatmap_target, mse_loss, softmax_cross_entropy
from .metrics import GroundTruth, IdMismatchError, ScoreRecord, normalized_error, topk_accuracy, topk_recall
from .raster import (
    BlurConfig,
    bresenham,
    encode_pgm,
    gaussian_blur,
    normalize,
    rasterize_boundary,
    resample_bilinear,
    scanline_fill,
)

__version__ = "0.1.0"
