"""Noise injection and evaluation metrics.

All randomness goes through numpy's default_rng (the PCG64 generator),
which has a fixed algorithm across platforms: the same seed always
yields the same corruption pattern. Intensities live on the [0, 1]
scale; sigma values follow the 8-bit convention and are divided by 255.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GAUSSIAN = "gaussian"
SALT_PEPPER = "salt_pepper"


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model description: sigma applies to gaussian, fraction to
    salt_pepper."""

    kind: str
    sigma: float = 0.0
    fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, SALT_PEPPER):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must lie in [0, 1]")

    def level(self) -> float:
        return self.sigma if self.kind == GAUSSIAN else self.fraction

    def describe(self) -> dict:
        return {"kind": self.kind, "level": self.level(), "seed": self.seed}


def add_gaussian_noise(img: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise with std sigma/255.

    The result is deliberately not clipped; clipping happens only when
    an image is written out for display.
    """
    if spec.kind != GAUSSIAN:
        raise ValueError(f"expected gaussian spec, got {spec.kind!r}")
    img = np.asarray(img, dtype=float)
    if spec.sigma == 0.0:
        return img.copy()
    rng = np.random.default_rng(spec.seed)
    return img + rng.normal(0.0, spec.sigma / 255.0, size=img.shape)


def add_salt_pepper(img: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """Corrupt each pixel independently with probability ``fraction``.

    Corrupted pixels are set to 0 or 1 with equal probability; the rest
    are copied bit-for-bit.
    """
    if spec.kind != SALT_PEPPER:
        raise ValueError(f"expected salt_pepper spec, got {spec.kind!r}")
    img = np.asarray(img, dtype=float)
    out = img.copy()
    if spec.fraction == 0.0:
        return out
    rng = np.random.default_rng(spec.seed)
    hit = rng.random(img.shape) < spec.fraction
    salt = rng.random(img.shape) < 0.5
    out[hit] = salt[hit].astype(float)
    return out


def apply_noise(img: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    if spec.kind == GAUSSIAN:
        return add_gaussian_noise(img, spec)
    return add_salt_pepper(img, spec)


def psnr(reference: np.ndarray, test: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB with peak 1.0.

    Identical images return math.inf.
    """
    reference = np.asarray(reference, dtype=float)
    test = np.asarray(test, dtype=float)
    if reference.shape != test.shape:
        raise ValueError(f"shape mismatch: {reference.shape} vs {test.shape}")
    mse = np.mean((reference - test) ** 2)
    if mse == 0.0:
        return math.inf
    return 20.0 * math.log10(1.0 / math.sqrt(mse))


def difference_image(
    reference: np.ndarray, denoised: np.ndarray, gain: float = 10.0
) -> np.ndarray:
    """Contrast-enhanced absolute difference, clipped to [0, 1]."""
    reference = np.asarray(reference, dtype=float)
    denoised = np.asarray(denoised, dtype=float)
    if reference.shape != denoised.shape:
        raise ValueError(f"shape mismatch: {reference.shape} vs {denoised.shape}")
    return np.clip(gain * np.abs(reference - denoised), 0.0, 1.0)
