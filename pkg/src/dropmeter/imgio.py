"""Image decoding and encoding.

Inputs are PNG (8-bit per channel, RGB or grayscale) and PGM/PPM. Decoded
rasters are float64 (h, w, 3) with channels in [0, 1]; grayscale sources are
replicated across the three channels. Output is always 8-bit RGB PNG, with
values quantized by round-half-away, so any raster whose values already sit
on the k/255 grid survives an encode/decode round trip bit for bit.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, InputContractError

__all__ = ["decode_image", "decode_image_bytes", "encode_png", "save_image"]

_FORMATS = ("PNG", "PPM")  # Pillow reports PGM and PPM under the one PPM reader
_MODES = ("RGB", "L")


def _to_raster(im: Image.Image, label: str) -> np.ndarray:
    if im.format not in _FORMATS:
        raise DecodeError(f"{label}: unsupported format {im.format!r} (need PNG, PGM, or PPM)")
    if im.mode not in _MODES:
        raise DecodeError(f"{label}: unsupported pixel mode {im.mode!r} (need 8-bit RGB or grayscale)")
    if im.width < 1 or im.height < 1:
        raise DecodeError(f"{label}: image has zero dimensions")
    try:
        arr = np.asarray(im, dtype=np.uint8)
    except OSError as exc:  # truncated or corrupt pixel data
        raise DecodeError(f"{label}: broken image data ({exc})") from None
    out = arr.astype(np.float64) / 255.0
    if out.ndim == 2:
        out = np.repeat(out[:, :, None], 3, axis=2)
    return out


def decode_image(path: str | Path) -> np.ndarray:
    path = Path(path)
    try:
        with Image.open(path) as im:
            return _to_raster(im, str(path))
    except FileNotFoundError:
        raise DecodeError(f"{path}: no such file") from None
    except UnidentifiedImageError:
        raise DecodeError(f"{path}: not a recognizable image") from None
    except OSError as exc:
        raise DecodeError(f"{path}: cannot read image ({exc})") from None


def decode_image_bytes(data: bytes, label: str = "<bytes>") -> np.ndarray:
    if not data:
        raise DecodeError(f"{label}: empty payload")
    try:
        with Image.open(io.BytesIO(data)) as im:
            return _to_raster(im, label)
    except UnidentifiedImageError:
        raise DecodeError(f"{label}: not a recognizable image") from None
    except OSError as exc:
        raise DecodeError(f"{label}: cannot read image ({exc})") from None


def _to_uint8(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3 or img.shape[0] < 1 or img.shape[1] < 1:
        raise InputContractError(f"expected an (h, w, 3) raster, got shape {img.shape}")
    return np.floor(np.clip(img, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def encode_png(img: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(_to_uint8(img), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def save_image(img: np.ndarray, path: str | Path) -> None:
    Path(path).write_bytes(encode_png(img))
