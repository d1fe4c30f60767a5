"""Analysis reports: the aggregate record produced for one card, lossless
JSON serialization with parse-back, CSV export, and overlay rendering.

The JSON layout is the tool's stable interchange schema; field names and
nesting are part of the public contract and documented in the README. Two
runs over the same image with the same parameters differ only in the
provenance timestamp. The CSV form carries no timestamp at all.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from ._version import __version__
from .errors import InputContractError, InputError, ParameterError
from .fractal import FractalEstimate
from .metrics import CardGeometry, CorrectionParams, CoverageWarning, SummaryStats
from .segment import SegmentationResult

__all__ = [
    "DropRecord",
    "ReportParameters",
    "Provenance",
    "CardAnalysisReport",
    "export_report",
    "report_from_json",
    "render_overlay",
    "render_markers",
]


@dataclass(frozen=True)
class DropRecord:
    """One droplet: pixel-space segment fields plus physical-unit fields."""

    id: int
    pixel_area: int
    centroid: tuple[float, float]
    bounding_box: tuple[int, int, int, int]
    area_um2: float
    diameter_um: float
    corrected_diameter_um: float


@dataclass(frozen=True)
class ReportParameters:
    bin_threshold: float
    marker_threshold: float
    correction: CorrectionParams
    geometry: CardGeometry


@dataclass(frozen=True)
class Provenance:
    input: str
    timestamp: str
    version: str


@dataclass(frozen=True)
class CardAnalysisReport:
    """Everything measured from one card. fractal is None for a blank card
    (the dimension of an empty mask is undefined)."""

    parameters: ReportParameters
    drops: list[DropRecord]
    summary: SummaryStats
    warning: CoverageWarning
    fractal: FractalEstimate | None
    provenance: Provenance


def report_to_dict(report: CardAnalysisReport) -> dict[str, Any]:
    p = report.parameters
    return {
        "parameters": {
            "bin_threshold": p.bin_threshold,
            "marker_threshold": p.marker_threshold,
            "correction": {"a": p.correction.a, "b": p.correction.b},
            "geometry": {
                "card_width_um": p.geometry.card_width_um,
                "card_height_um": p.geometry.card_height_um,
                "image_width_px": p.geometry.image_width_px,
                "image_height_px": p.geometry.image_height_px,
            },
        },
        "drops": [
            {
                "id": d.id,
                "pixel_area": d.pixel_area,
                "centroid_x": d.centroid[0],
                "centroid_y": d.centroid[1],
                "bbox_x0": d.bounding_box[0],
                "bbox_y0": d.bounding_box[1],
                "bbox_x1": d.bounding_box[2],
                "bbox_y1": d.bounding_box[3],
                "area_um2": d.area_um2,
                "diameter_um": d.diameter_um,
                "corrected_diameter_um": d.corrected_diameter_um,
            }
            for d in report.drops
        ],
        "summary": {
            "drop_count": report.summary.drop_count,
            "density_per_cm2": report.summary.density_per_cm2,
            "coverage_pct": report.summary.coverage_pct,
            "vmd_um": report.summary.vmd_um,
            "dv01_um": report.summary.dv01_um,
            "dv09_um": report.summary.dv09_um,
            "relative_span": report.summary.relative_span,
            "mean_area_um2": report.summary.mean_area_um2,
        },
        "warning": {"level": report.warning.level, "coverage_pct": report.warning.coverage_pct},
        "fractal": (
            None
            if report.fractal is None
            else {
                "dimension": report.fractal.dimension,
                "slope": report.fractal.slope,
                "r_squared": report.fractal.r_squared,
            }
        ),
        "provenance": {
            "input": report.provenance.input,
            "timestamp": report.provenance.timestamp,
            "version": report.provenance.version,
        },
    }


def report_from_dict(data: dict[str, Any]) -> CardAnalysisReport:
    try:
        p = data["parameters"]
        summary = data["summary"]
        warning = data["warning"]
        fractal = data["fractal"]
        prov = data["provenance"]
        return CardAnalysisReport(
            parameters=ReportParameters(
                bin_threshold=p["bin_threshold"],
                marker_threshold=p["marker_threshold"],
                correction=CorrectionParams(a=p["correction"]["a"], b=p["correction"]["b"]),
                geometry=CardGeometry(
                    card_width_um=p["geometry"]["card_width_um"],
                    card_height_um=p["geometry"]["card_height_um"],
                    image_width_px=p["geometry"]["image_width_px"],
                    image_height_px=p["geometry"]["image_height_px"],
                ),
            ),
            drops=[
                DropRecord(
                    id=d["id"],
                    pixel_area=d["pixel_area"],
                    centroid=(d["centroid_x"], d["centroid_y"]),
                    bounding_box=(d["bbox_x0"], d["bbox_y0"], d["bbox_x1"], d["bbox_y1"]),
                    area_um2=d["area_um2"],
                    diameter_um=d["diameter_um"],
                    corrected_diameter_um=d["corrected_diameter_um"],
                )
                for d in data["drops"]
            ],
            summary=SummaryStats(
                drop_count=summary["drop_count"],
                density_per_cm2=summary["density_per_cm2"],
                coverage_pct=summary["coverage_pct"],
                vmd_um=summary["vmd_um"],
                dv01_um=summary["dv01_um"],
                dv09_um=summary["dv09_um"],
                relative_span=summary["relative_span"],
                mean_area_um2=summary["mean_area_um2"],
            ),
            warning=CoverageWarning(level=warning["level"], coverage_pct=warning["coverage_pct"]),
            fractal=(
                None
                if fractal is None
                else FractalEstimate(
                    dimension=fractal["dimension"],
                    slope=fractal["slope"],
                    r_squared=fractal["r_squared"],
                )
            ),
            provenance=Provenance(
                input=prov["input"], timestamp=prov["timestamp"], version=prov["version"]
            ),
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed report JSON: {exc}") from None


def report_from_json(data: bytes | str) -> CardAnalysisReport:
    try:
        parsed = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InputError(f"not valid JSON: {exc}") from None
    if not isinstance(parsed, dict):
        raise InputError("report JSON must be an object")
    return report_from_dict(parsed)


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


_DROP_COLUMNS = [
    "id",
    "pixel_area",
    "centroid_x",
    "centroid_y",
    "bbox_x0",
    "bbox_y0",
    "bbox_x1",
    "bbox_y1",
    "area_um2",
    "diameter_um",
    "corrected_diameter_um",
]


def _to_csv(report: CardAnalysisReport) -> str:
    d = report_to_dict(report)
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["key", "value"])
    w.writerow(["version", report.provenance.version])
    w.writerow(["input", report.provenance.input])
    for key in ("bin_threshold", "marker_threshold"):
        w.writerow([key, _fmt(d["parameters"][key])])
    w.writerow(["correction_a", _fmt(d["parameters"]["correction"]["a"])])
    w.writerow(["correction_b", _fmt(d["parameters"]["correction"]["b"])])
    for key, value in d["parameters"]["geometry"].items():
        w.writerow([key, _fmt(value)])
    for key, value in d["summary"].items():
        w.writerow([key, _fmt(value)])
    w.writerow(["warning", report.warning.level])
    if report.fractal is None:
        w.writerow(["fractal_dimension", ""])
        w.writerow(["fractal_slope", ""])
        w.writerow(["fractal_r_squared", ""])
    else:
        w.writerow(["fractal_dimension", _fmt(report.fractal.dimension)])
        w.writerow(["fractal_slope", _fmt(report.fractal.slope)])
        w.writerow(["fractal_r_squared", _fmt(report.fractal.r_squared)])
    w.writerow([])
    w.writerow(_DROP_COLUMNS)
    for drop in d["drops"]:
        w.writerow([_fmt(drop[col]) for col in _DROP_COLUMNS])
    return out.getvalue()


def export_report(report: CardAnalysisReport, format: str = "json") -> bytes:
    """Serialize a report. JSON round-trips losslessly through
    report_from_json; CSV is a summary key/value block, a blank line, then
    one row per drop."""
    if format == "json":
        return (json.dumps(report_to_dict(report), indent=2) + "\n").encode("utf-8")
    if format == "csv":
        return _to_csv(report).encode("utf-8")
    raise ParameterError(f"unknown report format {format!r} (expected json or csv)")


def _hsv_to_rgb(h: np.ndarray, s: float, v: float) -> np.ndarray:
    i = np.floor(h * 6.0).astype(np.int64) % 6
    f = h * 6.0 - np.floor(h * 6.0)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    ones = np.full_like(h, v)
    pf = np.full_like(h, p)
    channels = [
        (ones, t, pf),
        (q, ones, pf),
        (pf, ones, t),
        (pf, q, ones),
        (t, pf, ones),
        (ones, pf, q),
    ]
    rgb = np.empty((h.size, 3), np.float64)
    for face, (r, g, b) in enumerate(channels):
        sel = i == face
        rgb[sel, 0] = r[sel]
        rgb[sel, 1] = g[sel]
        rgb[sel, 2] = b[sel]
    return rgb


GOLDEN_RATIO_CONJUGATE = 0.618033988749895


def segment_palette(count: int) -> np.ndarray:
    """Deterministic distinct colors, one per segment id; row 0 is unused.
    Hues advance by the golden-ratio conjugate so nearby ids differ sharply."""
    ids = np.arange(count + 1, dtype=np.float64)
    hues = (ids * GOLDEN_RATIO_CONJUGATE) % 1.0
    return _hsv_to_rgb(hues, 0.65, 0.95)


FILL_ALPHA = 0.45


def render_overlay(image: np.ndarray, result: SegmentationResult) -> np.ndarray:
    """Blend each segment's color over the original card and draw segment
    boundaries at full opacity. Pixels outside every segment pass through."""
    image = np.asarray(image, dtype=np.float64)
    labels = result.labels
    if image.ndim != 3 or image.shape[2] != 3 or image.shape[:2] != labels.shape:
        raise InputContractError(
            f"image shape {image.shape} does not match labels shape {labels.shape}"
        )
    out = image.copy()
    n = int(labels.max())
    if n == 0:
        return out
    palette = segment_palette(n)
    filled = labels > 0
    color = palette[labels[filled]]
    out[filled] = (1.0 - FILL_ALPHA) * out[filled] + FILL_ALPHA * color

    # Boundary pixels: labeled, with any 4-neighbor carrying a different label.
    padded = np.pad(labels, 1, constant_values=0)
    boundary = np.zeros(labels.shape, bool)
    for dy, dx in ((-1, 0), (0, -1), (0, 1), (1, 0)):
        shifted = padded[1 + dy : 1 + dy + labels.shape[0], 1 + dx : 1 + dx + labels.shape[1]]
        boundary |= filled & (shifted != labels)
    out[boundary] = palette[labels[boundary]]
    return out


def render_markers(markers: np.ndarray) -> np.ndarray:
    """Marker mask as a white-on-black rgb raster, for visual inspection."""
    markers = np.asarray(markers).astype(bool, copy=False)
    if markers.ndim != 2:
        raise InputContractError(f"marker mask must be 2D, got shape {markers.shape}")
    return np.repeat(markers.astype(np.float64)[:, :, None], 3, axis=2)
