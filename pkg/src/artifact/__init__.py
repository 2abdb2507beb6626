"""No-reference video artifact analysis.

Blockiness scoring from compass-gradient column statistics, temporal
detection of distorted frames, and spatial analysis of error blocks
(direction histograms, block classification, pattern orientation and
periodicity) -- all computed from the luma plane alone.
"""

from .blockiness import (
    BlockinessScore,
    BucketVector,
    accumulate_buckets,
    blockiness_measure,
)
from .frame_io import (
    FrameSourceError,
    GeometryError,
    LumaFrame,
    SourceSpec,
    load_frame_sequence,
)
from .gradient import (
    GradientField,
    SobelField,
    direction_grid,
    kirsch_gradient,
    quantize_direction,
    sobel_gradient,
)
from .report import (
    BlockSummary,
    DetectionReport,
    FrameScore,
    parse_report,
    write_report,
)
from .seba import (
    BlockRegion,
    DirectionHistogram,
    EmsTable,
    GdvTable,
    MatchResult,
    PatternGeometry,
    PatternOrientation,
    accumulate_ems,
    analyze_frame,
    classify_block,
    direction_histogram,
    estimate_uniform_block,
    family_bins,
    gdv_table,
    matching_score,
    pattern_dimensions,
    reduce_bins,
    rotation_offset,
)
from .synth import (
    PatternSpec,
    base_scene,
    inject_block_pattern,
    make_test_sequence,
    noise_field,
    pattern_frame,
    read_ground_truth,
    save_corpus,
)
from .temporal_detect import (
    DetectionConfig,
    PrMetrics,
    ScoreWindow,
    detect_sequence,
    evaluate_detection,
    frame_scores,
    is_distorted,
    window_stats,
)

__version__ = "0.1.0"

__all__ = [
    "BlockRegion",
    "BlockSummary",
    "BlockinessScore",
    "BucketVector",
    "DetectionConfig",
    "DetectionReport",
    "DirectionHistogram",
    "EmsTable",
    "FrameScore",
    "FrameSourceError",
    "GdvTable",
    "GeometryError",
    "GradientField",
    "LumaFrame",
    "MatchResult",
    "PatternGeometry",
    "PatternOrientation",
    "PatternSpec",
    "PrMetrics",
    "ScoreWindow",
    "SobelField",
    "SourceSpec",
    "accumulate_buckets",
    "accumulate_ems",
    "analyze_frame",
    "base_scene",
    "blockiness_measure",
    "classify_block",
    "detect_sequence",
    "direction_grid",
    "direction_histogram",
    "estimate_uniform_block",
    "evaluate_detection",
    "family_bins",
    "frame_scores",
    "gdv_table",
    "inject_block_pattern",
    "is_distorted",
    "kirsch_gradient",
    "load_frame_sequence",
    "make_test_sequence",
    "matching_score",
    "noise_field",
    "parse_report",
    "pattern_dimensions",
    "pattern_frame",
    "quantize_direction",
    "read_ground_truth",
    "reduce_bins",
    "rotation_offset",
    "save_corpus",
    "sobel_gradient",
    "window_stats",
    "write_report",
]
