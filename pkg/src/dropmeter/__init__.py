"""dropmeter: droplet analysis for water-sensitive spray cards.

Segments individual droplets from a scanned card and reports physical
deposition metrics (coverage, density, volumetric percentiles, relative
span), a box-counting fractal descriptor, and diameter feasibility per scan
resolution. Ships a CLI, an HTTP API, and a synthetic card generator used
as the test oracle.
"""

from __future__ import annotations

from ._version import __version__
from .errors import (
    CapacityError,
    CardSpecError,
    DecodeError,
    DistortionError,
    DropmeterError,
    EmptyMaskError,
    InputContractError,
    InputError,
    ParameterError,
)
from .fractal import BoxCountSeries, FractalEstimate, box_count, box_count_series, fractal_dimension
from .imgio import decode_image, decode_image_bytes, encode_png, save_image
from .metrics import (
    DEFAULT_CORRECTION,
    CardGeometry,
    CorrectionParams,
    CoverageWarning,
    DropletPhysical,
    SummaryStats,
    correct_diameter,
    coverage_warning,
    diameter_from_area,
    droplet_physical,
    min_pixels_for_diameter,
    px_to_um_ratio,
    summarize,
    volume_percentile,
)
from .pipeline import CardPipeline, analyze_card, analyze_card_stages, run_card_pipeline
from .raster import (
    DEFAULT_BIN_THRESHOLD,
    DEFAULT_MARKER_THRESHOLD,
    binarize,
    distance_transform,
    euclidean_distance,
    extract_markers,
    to_grayscale,
)
from .report import (
    CardAnalysisReport,
    DropRecord,
    Provenance,
    ReportParameters,
    export_report,
    render_markers,
    render_overlay,
    report_from_json,
    report_to_dict,
)
from .segment import (
    DropletSegment,
    LabeledMarkers,
    SegmentationResult,
    label_markers,
    measure_segments,
    watershed,
)
from .synthcard import (
    DiskSpec,
    GroundTruth,
    GroundTruthDisk,
    SyntheticCardSpec,
    control_card_spec,
    generate_card,
    load_card_spec,
)

__all__ = [
    "__version__",
    # errors
    "DropmeterError",
    "ParameterError",
    "DistortionError",
    "InputContractError",
    "InputError",
    "DecodeError",
    "CardSpecError",
    "CapacityError",
    "EmptyMaskError",
    # raster
    "DEFAULT_BIN_THRESHOLD",
    "DEFAULT_MARKER_THRESHOLD",
    "to_grayscale",
    "binarize",
    "euclidean_distance",
    "distance_transform",
    "extract_markers",
    # segmentation
    "LabeledMarkers",
    "DropletSegment",
    "SegmentationResult",
    "label_markers",
    "watershed",
    "measure_segments",
    # metrics
    "DEFAULT_CORRECTION",
    "CardGeometry",
    "CorrectionParams",
    "DropletPhysical",
    "SummaryStats",
    "CoverageWarning",
    "px_to_um_ratio",
    "diameter_from_area",
    "correct_diameter",
    "droplet_physical",
    "volume_percentile",
    "summarize",
    "coverage_warning",
    "min_pixels_for_diameter",
    # fractal
    "BoxCountSeries",
    "FractalEstimate",
    "box_count",
    "box_count_series",
    "fractal_dimension",
    # synthcard
    "DiskSpec",
    "SyntheticCardSpec",
    "GroundTruthDisk",
    "GroundTruth",
    "generate_card",
    "load_card_spec",
    "control_card_spec",
    # io and reports
    "decode_image",
    "decode_image_bytes",
    "encode_png",
    "save_image",
    "DropRecord",
    "ReportParameters",
    "Provenance",
    "CardAnalysisReport",
    "export_report",
    "report_from_json",
    "report_to_dict",
    "render_overlay",
    "render_markers",
    # pipeline
    "CardPipeline",
    "run_card_pipeline",
    "analyze_card",
    "analyze_card_stages",
]
