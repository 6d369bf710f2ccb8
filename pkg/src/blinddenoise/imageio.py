"""Grayscale image file I/O.

Binary 8-bit PGM (P5) is the native format: reading maps 0..255 to
[0, 1] by division, writing clips to [0, 1] and rounds half up. PNG is
supported when Pillow is installed.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np


class UnsupportedImageError(ValueError):
    """File exists but is not an image format this package reads."""


def read_image(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".png":
        return _read_png(path)
    return read_pgm(path)


def write_image(img: np.ndarray, path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".png":
        _write_png(img, path)
    else:
        write_pgm(img, path)


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:2] == b"P2":
        raise UnsupportedImageError("ASCII PGM (P2) not supported, use binary P5")
    if data[:2] != b"P5":
        raise UnsupportedImageError(f"not a binary PGM file: {path}")
    # Header: magic, width, height, maxval as whitespace-separated tokens
    # with optional '#' comments, then a single whitespace byte before the
    # raster.
    pos = 2
    fields = []
    while len(fields) < 3:
        match = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\d+)").match(data, pos)
        if match is None:
            raise UnsupportedImageError(f"malformed PGM header: {path}")
        fields.append(int(match.group(1)))
        pos = match.end()
    width, height, maxval = fields
    if maxval != 255:
        raise UnsupportedImageError(
            f"unsupported PGM bit depth (maxval {maxval}); only 8-bit handled"
        )
    pos += 1  # single whitespace separating header and raster
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise UnsupportedImageError(f"truncated PGM raster: {path}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return pixels.astype(float) / 255.0


def write_pgm(img: np.ndarray, path) -> None:
    quantized = quantize(img)
    header = f"P5\n{quantized.shape[1]} {quantized.shape[0]}\n255\n"
    Path(path).write_bytes(header.encode("ascii") + quantized.tobytes())


def quantize(img: np.ndarray) -> np.ndarray:
    """Clip to [0, 1] and map to uint8, rounding half up."""
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise ValueError(f"expected 2-D image, got shape {img.shape}")
    return np.floor(np.clip(img, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def _read_png(path) -> np.ndarray:
    try:
        from PIL import Image
    except ImportError as exc:
        raise UnsupportedImageError(
            "PNG support requires pillow (pip install blinddenoise[png])"
        ) from exc
    with Image.open(path) as im:
        gray = im.convert("L")
        return np.asarray(gray, dtype=float) / 255.0


def _write_png(img: np.ndarray, path) -> None:
    try:
        from PIL import Image
    except ImportError as exc:
        raise UnsupportedImageError(
            "PNG support requires pillow (pip install blinddenoise[png])"
        ) from exc
    Image.fromarray(quantize(img), mode="L").save(path)
