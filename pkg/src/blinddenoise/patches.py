"""Overlapping patch extraction and its adjoint.

Images are 2-D float arrays; a patch matrix stores one vectorized
patch per column, in raster order of the patch's top-left corner.
Extraction and aggregation share one index map, so the adjoint
identity <extract(x), Y> == <x, aggregate(Y)> holds to machine
precision by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class PatchConfig:
    """Square patch geometry. stride <= patch_size guarantees full cover."""

    patch_size: int = 8
    stride: int = 1

    def __post_init__(self):
        if self.patch_size < 1:
            raise ValueError(f"patch_size must be positive, got {self.patch_size}")
        if not 1 <= self.stride <= self.patch_size:
            raise ValueError(
                f"stride must be in [1, patch_size], got {self.stride} "
                f"for patch_size {self.patch_size}"
            )

    @property
    def dim(self) -> int:
        return self.patch_size * self.patch_size


def _check_dims(cfg: PatchConfig, height: int, width: int) -> None:
    if height < cfg.patch_size or width < cfg.patch_size:
        raise ValueError(
            f"image {height}x{width} smaller than patch size {cfg.patch_size}"
        )


def _starts(extent: int, patch_size: int, stride: int) -> np.ndarray:
    # Positions fully inside the image; an extra flush-to-border patch is
    # appended when the stride does not land exactly on the last position,
    # so the final row/column of pixels is always covered.
    last = extent - patch_size
    s = list(range(0, last + 1, stride))
    if s[-1] != last:
        s.append(last)
    return np.asarray(s, dtype=np.int64)


@lru_cache(maxsize=16)
def _patch_index_map(patch_size: int, stride: int, height: int, width: int):
    """Pixel indices, shape (patch_size^2, count), column j = j-th patch."""
    rows = _starts(height, patch_size, stride)
    cols = _starts(width, patch_size, stride)
    base = (rows[:, None] * width + cols[None, :]).ravel()
    offs = (np.arange(patch_size)[:, None] * width + np.arange(patch_size)).ravel()
    idx = offs[:, None] + base[None, :]
    idx.setflags(write=False)
    return idx


def patch_count(cfg: PatchConfig, height: int, width: int) -> int:
    """Number of patch positions for the given geometry."""
    _check_dims(cfg, height, width)
    rows = _starts(height, cfg.patch_size, cfg.stride)
    cols = _starts(width, cfg.patch_size, cfg.stride)
    return rows.size * cols.size


def extract_patches(img: np.ndarray, cfg: PatchConfig) -> np.ndarray:
    """Extract all overlapping patches of ``img`` as columns.

    Column j holds the row-major vectorized patch whose top-left corner
    is the j-th position in raster order. Returns a (patch_size^2, count)
    array.
    """
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise ValueError(f"expected 2-D image, got shape {img.shape}")
    h, w = img.shape
    _check_dims(cfg, h, w)
    idx = _patch_index_map(cfg.patch_size, cfg.stride, h, w)
    return img.ravel()[idx]


def aggregate_patches(
    pm: np.ndarray, cfg: PatchConfig, height: int, width: int
) -> np.ndarray:
    """Adjoint of :func:`extract_patches`: scatter columns back and sum.

    Each pixel receives the sum of every patch entry mapping to it; no
    averaging is applied.
    """
    pm = np.asarray(pm, dtype=float)
    _check_dims(cfg, height, width)
    idx = _patch_index_map(cfg.patch_size, cfg.stride, height, width)
    if pm.shape != idx.shape:
        raise ValueError(
            f"patch matrix shape {pm.shape} inconsistent with geometry "
            f"{idx.shape} for {height}x{width} image"
        )
    flat = np.bincount(idx.ravel(), weights=pm.ravel(), minlength=height * width)
    return flat.reshape(height, width)


def overlap_counts(cfg: PatchConfig, height: int, width: int) -> np.ndarray:
    """Per-pixel number of covering patches (diagonal of sum_i P_i^T P_i)."""
    _check_dims(cfg, height, width)
    idx = _patch_index_map(cfg.patch_size, cfg.stride, height, width)
    flat = np.bincount(idx.ravel(), minlength=height * width)
    return flat.astype(float).reshape(height, width)
