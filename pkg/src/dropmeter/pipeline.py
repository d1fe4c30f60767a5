"""End-to-end card analysis: grayscale, binarize, distance transform,
markers, watershed, then physical metrics, coverage warning, and the
fractal descriptor, assembled into a CardAnalysisReport.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from ._version import __version__
from .errors import InputContractError
from .fractal import FractalEstimate, fractal_dimension
from .metrics import (
    DEFAULT_CORRECTION,
    CardGeometry,
    CorrectionParams,
    coverage_warning,
    droplet_physical,
    px_to_um_ratio,
    summarize,
)
from .raster import (
    DEFAULT_BIN_THRESHOLD,
    DEFAULT_MARKER_THRESHOLD,
    binarize,
    distance_transform,
    extract_markers,
    to_grayscale,
)
from .report import CardAnalysisReport, DropRecord, Provenance, ReportParameters
from .segment import LabeledMarkers, SegmentationResult, label_markers, watershed

__all__ = ["CardPipeline", "run_card_pipeline", "analyze_card", "analyze_card_stages"]


@dataclass(frozen=True)
class CardPipeline:
    """All intermediate stages of one segmentation run, for inspection and
    rendering; analyze_card wraps this with the physical metrics."""

    gray: np.ndarray
    mask: np.ndarray
    distance: np.ndarray
    markers: np.ndarray
    labeled: LabeledMarkers
    segmentation: SegmentationResult


def run_card_pipeline(
    image: np.ndarray,
    bin_threshold: float = DEFAULT_BIN_THRESHOLD,
    marker_threshold: float = DEFAULT_MARKER_THRESHOLD,
) -> CardPipeline:
    gray = to_grayscale(image)
    mask = binarize(gray, bin_threshold)
    distance = distance_transform(mask)
    # A zero threshold would mark background pixels (distance 0 >= 0), so
    # clip markers to the foreground before labeling.
    markers = extract_markers(distance, marker_threshold) & mask
    labeled = label_markers(markers)
    segmentation = watershed(gray, labeled, mask)
    return CardPipeline(
        gray=gray,
        mask=mask,
        distance=distance,
        markers=markers,
        labeled=labeled,
        segmentation=segmentation,
    )


def analyze_card_stages(
    image: np.ndarray,
    geom: CardGeometry,
    *,
    bin_threshold: float = DEFAULT_BIN_THRESHOLD,
    marker_threshold: float = DEFAULT_MARKER_THRESHOLD,
    correction: CorrectionParams = DEFAULT_CORRECTION,
    input_label: str = "<memory>",
    timestamp: str | None = None,
) -> tuple[CardAnalysisReport, CardPipeline]:
    """Analyze one card image. Returns the report plus the pipeline stages
    (the latter so callers can render overlays without re-running).

    A card with zero drops is a valid result; its percentile fields are
    absent and its fractal estimate is None when the mask is empty.
    """
    h, w = np.asarray(image).shape[:2]
    if (geom.image_width_px, geom.image_height_px) != (w, h):
        raise InputContractError(
            f"geometry says {geom.image_width_px}x{geom.image_height_px} px "
            f"but the image is {w}x{h}"
        )
    ratio = px_to_um_ratio(geom)  # validates geometry before the heavy stages
    pipe = run_card_pipeline(image, bin_threshold, marker_threshold)

    physical = [droplet_physical(seg, ratio, correction) for seg in pipe.segmentation.segments]
    drops = [
        DropRecord(
            id=seg.id,
            pixel_area=seg.pixel_area,
            centroid=seg.centroid,
            bounding_box=seg.bounding_box,
            area_um2=phys.area_um2,
            diameter_um=phys.diameter_um,
            corrected_diameter_um=phys.corrected_diameter_um,
        )
        for seg, phys in zip(pipe.segmentation.segments, physical)
    ]
    summary = summarize(physical, geom, pipe.mask)
    warning = coverage_warning(summary.coverage_pct)
    fractal: FractalEstimate | None = fractal_dimension(pipe.mask) if pipe.mask.any() else None
    report = CardAnalysisReport(
        parameters=ReportParameters(
            bin_threshold=bin_threshold,
            marker_threshold=marker_threshold,
            correction=correction,
            geometry=geom,
        ),
        drops=drops,
        summary=summary,
        warning=warning,
        fractal=fractal,
        provenance=Provenance(
            input=input_label,
            # None means "stamp now"; an explicit empty string is kept as-is
            # so deterministic callers can opt out of wall-clock state.
            timestamp=timestamp if timestamp is not None else datetime.now(timezone.utc).isoformat(),
            version=__version__,
        ),
    )
    return report, pipe


def analyze_card(
    image: np.ndarray,
    geom: CardGeometry,
    *,
    bin_threshold: float = DEFAULT_BIN_THRESHOLD,
    marker_threshold: float = DEFAULT_MARKER_THRESHOLD,
    correction: CorrectionParams = DEFAULT_CORRECTION,
    input_label: str = "<memory>",
    timestamp: str | None = None,
) -> CardAnalysisReport:
    """analyze_card_stages without the intermediate stages."""
    report, _ = analyze_card_stages(
        image,
        geom,
        bin_threshold=bin_threshold,
        marker_threshold=marker_threshold,
        correction=correction,
        input_label=input_label,
        timestamp=timestamp,
    )
    return report
