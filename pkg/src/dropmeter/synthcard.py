"""Deterministic synthetic card generator with exact ground truth.

Cards are flat-gray rasters with dark disks. Centers live in continuous
pixel coordinates; a pixel (row i, col j), whose center is (j+0.5, i+0.5),
belongs to a disk iff that center lies strictly inside the circle. Under
that rule the expected rasterized area of a radius-r disk is exactly
pi*r^2, so ground-truth areas are analytic, not approximate.

Gray levels are snapped to the k/255 grid at generation time, which makes
the raster survive an 8-bit PNG round trip bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import CapacityError, CardSpecError
from .metrics import UM_PER_INCH, min_pixels_for_diameter
from .raster import DEFAULT_BIN_THRESHOLD

__all__ = [
    "DiskSpec",
    "SyntheticCardSpec",
    "GroundTruthDisk",
    "GroundTruth",
    "generate_card",
    "load_card_spec",
    "control_card_spec",
]

MAX_PLACEMENT_RETRIES = 10_000

# Control-card replica: disk counts per diameter class (µm -> count).
CONTROL_CLASSES: dict[float, int] = {50.0: 80, 100.0: 60, 250.0: 50, 500.0: 30, 1000.0: 12}


def _snap_gray(g: float) -> float:
    return int(g * 255.0 + 0.5) / 255.0


def _round_half_away(x: float) -> int:
    return int(np.floor(x + 0.5))


@dataclass(frozen=True)
class DiskSpec:
    """One requested disk. center, when given, is (x, y) in continuous pixel
    coordinates; None means the generator places it pseudorandomly."""

    diameter_um: float
    center: tuple[float, float] | None = None


@dataclass(frozen=True)
class SyntheticCardSpec:
    card_width_um: float = 76_000.0
    card_height_um: float = 26_000.0
    dpi: float = 1200.0
    disks: list[DiskSpec] = field(default_factory=list)
    overlap_policy: str = "forbid"
    background_gray: float = 0.85
    drop_gray: float = 0.15
    seed: int = 0
    min_gap_px: float = 2.0
    edge_blend: bool = False


@dataclass(frozen=True)
class GroundTruthDisk:
    center: tuple[float, float]
    diameter_um: float
    area_px: int


@dataclass(frozen=True)
class GroundTruth:
    disks: list[GroundTruthDisk]
    total_coverage_fraction: float


def _validate(spec: SyntheticCardSpec) -> None:
    if spec.card_width_um <= 0 or spec.card_height_um <= 0 or spec.dpi <= 0:
        raise CardSpecError("card dimensions and dpi must be positive")
    if spec.overlap_policy not in ("forbid", "allow"):
        raise CardSpecError(f"overlap policy must be forbid or allow, got {spec.overlap_policy!r}")
    if not (0.0 <= spec.drop_gray <= 1.0 and 0.0 <= spec.background_gray <= 1.0):
        raise CardSpecError("gray levels must lie in [0, 1]")
    drop = _snap_gray(spec.drop_gray)
    bg = _snap_gray(spec.background_gray)
    # The default binarization threshold must separate the two levels, or
    # the generated card cannot serve as a segmentation oracle.
    if not (drop < DEFAULT_BIN_THRESHOLD <= bg):
        raise CardSpecError(
            f"need drop_gray < {DEFAULT_BIN_THRESHOLD} <= background_gray after "
            f"8-bit snapping, got {drop:.4f} and {bg:.4f}"
        )
    if spec.min_gap_px < 0:
        raise CardSpecError("min_gap_px must be >= 0")
    for disk in spec.disks:
        if disk.diameter_um <= 0:
            raise CardSpecError(f"disk diameter must be positive, got {disk.diameter_um}")
        if min_pixels_for_diameter(disk.diameter_um, spec.dpi) is None:
            raise CardSpecError(
                f"{disk.diameter_um} um is not representable at {spec.dpi} dpi"
            )


def _raster_size(spec: SyntheticCardSpec) -> tuple[int, int]:
    w = _round_half_away(spec.card_width_um * spec.dpi / UM_PER_INCH)
    h = _round_half_away(spec.card_height_um * spec.dpi / UM_PER_INCH)
    return h, w


def _disk_alpha(cx: float, cy: float, r: float, h: int, w: int, blend: bool):
    """Alpha footprint of one disk over its bounding box. Hard edges give
    alpha in {0, 1}; blending ramps linearly over the last pixel of radius."""
    i0 = max(0, int(np.floor(cy - r - 1.0)))
    i1 = min(h, int(np.ceil(cy + r + 1.0)))
    j0 = max(0, int(np.floor(cx - r - 1.0)))
    j1 = min(w, int(np.ceil(cx + r + 1.0)))
    yy = np.arange(i0, i1, dtype=np.float64) + 0.5
    xx = np.arange(j0, j1, dtype=np.float64) + 0.5
    dist = np.sqrt((yy[:, None] - cy) ** 2 + (xx[None, :] - cx) ** 2)
    hard = dist < r
    if blend:
        alpha = np.clip(r - dist, 0.0, 1.0)
    else:
        alpha = hard.astype(np.float64)
    return i0, j0, alpha, hard


def generate_card(spec: SyntheticCardSpec) -> tuple[np.ndarray, GroundTruth]:
    """Render the card and report exact per-disk rasterized areas.

    Identical specs (seed included) give bit-identical rasters. Disks never
    cross the card border. With overlap_policy=forbid, placement keeps
    center distances above r_i + r_j + min_gap_px and gives up with a
    capacity error after 10,000 rejected samples for any one disk.
    """
    _validate(spec)
    h, w = _raster_size(spec)
    rng = np.random.default_rng(spec.seed)

    placed: list[tuple[float, float, float, float]] = []  # cx, cy, r_px, diameter_um
    for disk in spec.disks:
        r = (disk.diameter_um / 2.0) * spec.dpi / UM_PER_INCH
        if 2.0 * r > min(w, h):
            raise CardSpecError(f"{disk.diameter_um} um disk does not fit on the card")
        if disk.center is not None:
            cx, cy = float(disk.center[0]), float(disk.center[1])
            if not (r <= cx <= w - r and r <= cy <= h - r):
                raise CardSpecError(f"disk at ({cx}, {cy}) crosses the card border")
            if spec.overlap_policy == "forbid" and not _clears(cx, cy, r, placed, spec.min_gap_px):
                raise CardSpecError(f"fixed-position disk at ({cx}, {cy}) overlaps another disk")
            placed.append((cx, cy, r, disk.diameter_um))
            continue
        for attempt in range(MAX_PLACEMENT_RETRIES + 1):
            if attempt == MAX_PLACEMENT_RETRIES:
                raise CapacityError(
                    f"could not place a {disk.diameter_um} um disk after "
                    f"{MAX_PLACEMENT_RETRIES} tries; the card is too crowded"
                )
            cx = float(rng.uniform(r, w - r))
            cy = float(rng.uniform(r, h - r))
            if spec.overlap_policy == "allow" or _clears(cx, cy, r, placed, spec.min_gap_px):
                placed.append((cx, cy, r, disk.diameter_um))
                break

    bg = _snap_gray(spec.background_gray)
    drop = _snap_gray(spec.drop_gray)
    alpha_canvas = np.zeros((h, w), np.float64)
    footprint = np.zeros((h, w), bool)
    truth: list[GroundTruthDisk] = []
    for cx, cy, r, diameter_um in placed:
        i0, j0, alpha, hard = _disk_alpha(cx, cy, r, h, w, spec.edge_blend)
        ai, aj = alpha.shape
        region = alpha_canvas[i0 : i0 + ai, j0 : j0 + aj]
        np.maximum(region, alpha, out=region)
        footprint[i0 : i0 + ai, j0 : j0 + aj] |= hard
        truth.append(
            GroundTruthDisk(center=(cx, cy), diameter_um=diameter_um, area_px=int(hard.sum()))
        )

    gray = bg + (drop - bg) * alpha_canvas
    gray = np.floor(gray * 255.0 + 0.5) / 255.0
    raster = np.repeat(gray[:, :, None], 3, axis=2)
    coverage = float(np.count_nonzero(footprint)) / footprint.size
    return raster, GroundTruth(disks=truth, total_coverage_fraction=coverage)


def _clears(cx: float, cy: float, r: float, placed: list, gap: float) -> bool:
    for px, py, pr, _ in placed:
        if (cx - px) ** 2 + (cy - py) ** 2 <= (r + pr + gap) ** 2:
            return False
    return True


def control_card_spec(dpi: float = 1200.0, seed: int = 7) -> SyntheticCardSpec:
    """Replica of a five-class calibration card: 80x50, 60x100, 50x250,
    30x500, and 12x1,000 µm disks on a 76 mm by 26 mm card."""
    disks = [
        DiskSpec(diameter_um=d)
        for d in sorted(CONTROL_CLASSES, reverse=True)  # big disks first place easier
        for _ in range(CONTROL_CLASSES[d])
    ]
    return SyntheticCardSpec(dpi=dpi, disks=disks, seed=seed)


def _parse_disk(value: str, lineno: int) -> list[DiskSpec]:
    """disk = D | disk = D x COUNT | disk = D @ CX, CY"""
    try:
        if "@" in value:
            dpart, cpart = value.split("@", 1)
            cx, cy = (float(t) for t in cpart.split(","))
            return [DiskSpec(diameter_um=float(dpart), center=(cx, cy))]
        if "x" in value:
            dpart, npart = value.split("x", 1)
            count = int(npart)
            if count < 0:
                raise ValueError("negative count")
            return [DiskSpec(diameter_um=float(dpart))] * count
        return [DiskSpec(diameter_um=float(value))]
    except ValueError as exc:
        raise CardSpecError(f"line {lineno}: bad disk entry {value!r} ({exc})") from None


def load_card_spec(path: str | Path) -> SyntheticCardSpec:
    """Read a card spec from a plain-text key-value file.

    Lines are `key = value`; blank lines and #-comments are ignored. Keys:
    card_width_um, card_height_um, dpi, overlap (forbid|allow),
    background_gray, drop_gray, seed, min_gap_px, edge_blend (on|off), and
    one `disk = ...` line per entry (repeatable):

        disk = 500             one 500 µm disk, random position
        disk = 50 x 80         eighty 50 µm disks
        disk = 700 @ 120, 88   one disk centered at pixel (120, 88)
    """
    spec = SyntheticCardSpec()
    disks: list[DiskSpec] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CardSpecError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key == "disk":
                disks.extend(_parse_disk(value, lineno))
            elif key == "card_width_um":
                spec = replace(spec, card_width_um=float(value))
            elif key == "card_height_um":
                spec = replace(spec, card_height_um=float(value))
            elif key == "dpi":
                spec = replace(spec, dpi=float(value))
            elif key == "overlap":
                spec = replace(spec, overlap_policy=value)
            elif key == "background_gray":
                spec = replace(spec, background_gray=float(value))
            elif key == "drop_gray":
                spec = replace(spec, drop_gray=float(value))
            elif key == "seed":
                spec = replace(spec, seed=int(value))
            elif key == "min_gap_px":
                spec = replace(spec, min_gap_px=float(value))
            elif key == "edge_blend":
                if value not in ("on", "off"):
                    raise ValueError("expected on or off")
                spec = replace(spec, edge_blend=value == "on")
            else:
                raise CardSpecError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise CardSpecError(f"line {lineno}: bad value for {key}: {value!r} ({exc})") from None
    return replace(spec, disks=disks)
