"""Raster primitives: grayscale reduction, binarization, exact Euclidean
distance transform, and marker extraction.

Rasters are plain numpy arrays indexed [row, col] ([y, x]):

* rgb image   -- float64, shape (h, w, 3), channels in [0, 1]
* gray image  -- float64, shape (h, w), values in [0, 1]
* binary mask -- bool, shape (h, w), True = droplet (foreground)
* distance map-- float64, shape (h, w), min-max normalized to [0, 1]
* marker mask -- bool, shape (h, w), True = marker pixel

All functions are pure: inputs are never mutated and outputs are freshly
allocated, so concurrent calls are safe.
"""

from __future__ import annotations

import numpy as np

from ._edt import edt_sq_rows
from .errors import InputContractError, ParameterError

GRAY_WEIGHTS = (0.299, 0.587, 0.114)

DEFAULT_BIN_THRESHOLD = 0.35
DEFAULT_MARKER_THRESHOLD = 0.17


def _require_2d(arr: np.ndarray, name: str) -> None:
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputContractError(f"{name} must be a non-empty 2D array, got shape {arr.shape}")


def _check_threshold(threshold: float) -> float:
    threshold = float(threshold)
    if not (0.0 <= threshold <= 1.0) or threshold != threshold:
        raise ParameterError(f"threshold must lie in [0, 1], got {threshold}")
    return threshold


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Reduce an RGB raster to gray: 0.299 R + 0.587 G + 0.114 B, clamped to [0, 1]."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3 or img.shape[0] < 1 or img.shape[1] < 1:
        raise InputContractError(f"expected an (h, w, 3) rgb raster, got shape {img.shape}")
    r, g, b = GRAY_WEIGHTS
    gray = img[:, :, 0] * r + img[:, :, 1] * g + img[:, :, 2] * b
    return np.clip(gray, 0.0, 1.0)


def binarize(gray: np.ndarray, threshold: float = DEFAULT_BIN_THRESHOLD) -> np.ndarray:
    """Mark droplet pixels: True where gray is strictly below the threshold.

    Spray cards stain dark where liquid lands, so dark pixels are the
    foreground of every later step.
    """
    gray = np.asarray(gray, dtype=np.float64)
    _require_2d(gray, "gray image")
    threshold = _check_threshold(threshold)
    return gray < threshold


def euclidean_distance(mask: np.ndarray) -> np.ndarray:
    """Exact Euclidean distance from each droplet pixel to the nearest
    background pixel, measured between pixel centers; background pixels get 0.

    A mask with no background at all treats the image border as background:
    each pixel receives its distance to the nearest outside-the-image pixel
    center. An all-background mask is all zeros.
    """
    mask = np.asarray(mask)
    _require_2d(mask, "mask")
    mask = mask.astype(bool, copy=False)
    h, w = mask.shape

    if not mask.any():
        return np.zeros((h, w), np.float64)
    if mask.all():
        ys = np.minimum(np.arange(1, h + 1), np.arange(h, 0, -1)).reshape(-1, 1)
        xs = np.minimum(np.arange(1, w + 1), np.arange(w, 0, -1)).reshape(1, -1)
        return np.minimum(ys, xs).astype(np.float64)

    # Column pass: exact vertical distance to the nearest background pixel in
    # the same column (h + w is unreachable, so it acts as +inf; its square
    # exceeds any true squared distance, so bogus parabolas never win).
    far = float(h + w)
    dv = np.where(mask, far, 0.0)
    for i in range(1, h):
        np.minimum(dv[i], dv[i - 1] + 1.0, out=dv[i])
    for i in range(h - 2, -1, -1):
        np.minimum(dv[i], dv[i + 1] + 1.0, out=dv[i])

    d2 = edt_sq_rows(dv * dv)
    return np.sqrt(d2)


def distance_transform(mask: np.ndarray) -> np.ndarray:
    """Euclidean distance transform, min-max normalized to [0, 1].

    The normalization is global over the image. When every raw distance is
    the same nonzero value (possible only on tiny all-foreground masks) the
    foreground maps to 1. If any foreground exists the maximum is exactly 1.
    """
    raw = euclidean_distance(mask)
    dmin = raw.min()
    dmax = raw.max()
    if dmax == dmin:
        if dmax == 0.0:
            return raw
        out = np.zeros_like(raw)
        out[raw > 0] = 1.0
        return out
    return (raw - dmin) / (dmax - dmin)


def extract_markers(dist: np.ndarray, threshold: float = DEFAULT_MARKER_THRESHOLD) -> np.ndarray:
    """Keep the strongest core of each droplet: True where the normalized
    distance is >= threshold."""
    dist = np.asarray(dist, dtype=np.float64)
    _require_2d(dist, "distance map")
    threshold = _check_threshold(threshold)
    if dist.size and (dist.min() < 0.0 or dist.max() > 1.0 + 1e-9):
        raise InputContractError("distance map is not min-max normalized to [0, 1]")
    return dist >= threshold
