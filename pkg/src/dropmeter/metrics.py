"""Physical droplet metrics: pixel-to-micrometer conversion, diameters,
the power-law diameter correction, and card-level summary statistics
(coverage, density, volume percentiles, relative span, warnings).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import DistortionError, ParameterError
from .segment import DropletSegment

__all__ = [
    "CardGeometry",
    "DropletPhysical",
    "CorrectionParams",
    "SummaryStats",
    "CoverageWarning",
    "DEFAULT_CORRECTION",
    "UM_PER_INCH",
    "px_to_um_ratio",
    "diameter_from_area",
    "correct_diameter",
    "droplet_physical",
    "volume_percentile",
    "summarize",
    "coverage_warning",
    "min_pixels_for_diameter",
]

UM_PER_INCH = 25_400.0

WarningLevel = Literal["none", "questionable", "unfeasible"]

# Coverage above 20% makes counts questionable; near 70% the card is
# saturated and unfeasible to analyze.
QUESTIONABLE_COVERAGE_PCT = 20.0
UNFEASIBLE_COVERAGE_PCT = 70.0

ASPECT_TOLERANCE = 0.02


@dataclass(frozen=True)
class CardGeometry:
    """Physical card dimensions paired with the scanned image dimensions."""

    card_width_um: float
    card_height_um: float
    image_width_px: int
    image_height_px: int

    @classmethod
    def from_mm(cls, width_mm: float, height_mm: float, image_width_px: int, image_height_px: int) -> CardGeometry:
        return cls(width_mm * 1000.0, height_mm * 1000.0, image_width_px, image_height_px)

    def card_area_cm2(self) -> float:
        return (self.card_width_um / 10_000.0) * (self.card_height_um / 10_000.0)


@dataclass(frozen=True)
class DropletPhysical:
    """One droplet in physical units. corrected_diameter_um applies the
    power-law spread correction; diameter_um is the uncorrected measurement.
    Both are always reported."""

    segment_id: int
    area_um2: float
    diameter_um: float
    corrected_diameter_um: float


@dataclass(frozen=True)
class CorrectionParams:
    """Power-law correction d' = a * d**b. The defaults suit the reference
    water-sensitive paper; rigs with other papers or liquids need their own
    calibration."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0.0 and self.b > 0.0):
            raise ParameterError(f"correction params must be positive, got a={self.a}, b={self.b}")


DEFAULT_CORRECTION = CorrectionParams(a=0.2192733, b=1.227941)


@dataclass(frozen=True)
class SummaryStats:
    """Card-level statistics. Percentile fields are None when there are no
    drops; coverage is always computed from the binary mask."""

    drop_count: int
    density_per_cm2: float
    coverage_pct: float
    vmd_um: float | None
    dv01_um: float | None
    dv09_um: float | None
    relative_span: float | None
    mean_area_um2: float | None


@dataclass(frozen=True)
class CoverageWarning:
    level: WarningLevel
    coverage_pct: float


def px_to_um_ratio(geom: CardGeometry) -> float:
    """Micrometers represented by one pixel: card_width_um / image_width_px.

    The single ratio is only meaningful for a non-distorted image, so the
    card and image aspect ratios must agree within 2%.
    """
    if not (
        geom.card_width_um > 0
        and geom.card_height_um > 0
        and geom.image_width_px > 0
        and geom.image_height_px > 0
    ):
        raise ParameterError(f"geometry must be strictly positive, got {geom}")
    card_aspect = geom.card_width_um / geom.card_height_um
    image_aspect = geom.image_width_px / geom.image_height_px
    if abs(image_aspect - card_aspect) > ASPECT_TOLERANCE * card_aspect:
        raise DistortionError(
            f"card aspect {card_aspect:.4f} and image aspect {image_aspect:.4f} "
            f"disagree by more than {ASPECT_TOLERANCE:.0%}; the scan looks distorted"
        )
    return geom.card_width_um / geom.image_width_px


def diameter_from_area(area_px: float, ratio: float) -> float:
    """Equivalent-circle diameter in micrometers: 2 * sqrt(area_px / pi) * ratio."""
    if area_px < 1 or ratio <= 0:
        raise ParameterError(f"need area_px >= 1 and ratio > 0, got {area_px}, {ratio}")
    return 2.0 * math.sqrt(area_px / math.pi) * ratio


def correct_diameter(d: float, params: CorrectionParams = DEFAULT_CORRECTION) -> float:
    """Apply the spread-factor correction d' = a * d**b."""
    if d <= 0:
        raise ParameterError(f"diameter must be positive, got {d}")
    return params.a * d**params.b


def droplet_physical(
    segment: DropletSegment, ratio: float, params: CorrectionParams = DEFAULT_CORRECTION
) -> DropletPhysical:
    """Convert one pixel-space segment to physical units."""
    d = diameter_from_area(segment.pixel_area, ratio)
    return DropletPhysical(
        segment_id=segment.id,
        area_um2=segment.pixel_area * ratio * ratio,
        diameter_um=d,
        corrected_diameter_um=correct_diameter(d, params),
    )


def volume_percentile(diameters: Sequence[float] | np.ndarray, p: float) -> float:
    """D_Vp: the smallest diameter in the sorted list whose cumulative volume
    fraction reaches p. Volumes are proportional to d cubed; no interpolation.
    """
    if not (0.0 < p <= 1.0):
        raise ParameterError(f"percentile must lie in (0, 1], got {p}")
    d = np.sort(np.asarray(diameters, dtype=np.float64))
    if d.size == 0:
        raise ParameterError("volume percentile of an empty diameter list")
    if d[0] <= 0:
        raise ParameterError("diameters must be positive")
    cum = np.cumsum(d * d * d)
    total = cum[-1]
    idx = int(np.flatnonzero(cum / total >= p)[0])
    return float(d[idx])


def summarize(drops: Sequence[DropletPhysical], geom: CardGeometry, mask: np.ndarray) -> SummaryStats:
    """Card-level statistics from the per-drop records and the binary mask.

    Coverage comes from the mask rather than the union of segments, so it
    stays meaningful on saturated cards where segmentation degrades.
    """
    mask = np.asarray(mask).astype(bool, copy=False)
    coverage = 100.0 * float(np.count_nonzero(mask)) / mask.size
    density = len(drops) / geom.card_area_cm2()
    if not drops:
        return SummaryStats(
            drop_count=0,
            density_per_cm2=density,
            coverage_pct=coverage,
            vmd_um=None,
            dv01_um=None,
            dv09_um=None,
            relative_span=None,
            mean_area_um2=None,
        )
    diameters = np.array([d.diameter_um for d in drops], dtype=np.float64)
    dv01 = volume_percentile(diameters, 0.1)
    vmd = volume_percentile(diameters, 0.5)
    dv09 = volume_percentile(diameters, 0.9)
    return SummaryStats(
        drop_count=len(drops),
        density_per_cm2=density,
        coverage_pct=coverage,
        vmd_um=vmd,
        dv01_um=dv01,
        dv09_um=dv09,
        relative_span=(dv09 - dv01) / vmd,
        mean_area_um2=float(np.mean([d.area_um2 for d in drops])),
    )


def coverage_warning(coverage_pct: float) -> CoverageWarning:
    """Classify coverage: none <= 20 < questionable <= 70 < unfeasible."""
    if not (0.0 <= coverage_pct <= 100.0):
        raise ParameterError(f"coverage must lie in [0, 100], got {coverage_pct}")
    if coverage_pct > UNFEASIBLE_COVERAGE_PCT:
        level: WarningLevel = "unfeasible"
    elif coverage_pct > QUESTIONABLE_COVERAGE_PCT:
        level = "questionable"
    else:
        level = "none"
    return CoverageWarning(level=level, coverage_pct=coverage_pct)


def min_pixels_for_diameter(diameter_um: float, dpi: float) -> int | None:
    """Pixels needed to represent a length at a scan resolution, or None when
    the length falls below one exact pixel (not representable).

    exact = diameter_um * dpi / 25,400; results round half away from zero.
    """
    if diameter_um <= 0 or dpi <= 0:
        raise ParameterError(f"need positive diameter and dpi, got {diameter_um}, {dpi}")
    exact = diameter_um * dpi / UM_PER_INCH
    if exact < 1.0:
        return None
    return int(math.floor(exact + 0.5))
