"""Blind image denoising: patch autoencoder learned from the noisy
image itself, with Gaussian and impulse noise models and a
transform-learning baseline."""

from .gaussian import AutoencoderState, SolverConfig, denoise_gaussian
from .impulse import ImpulseState, denoise_impulse, impulse_tuned_config
from .noise import (
    NoiseSpec,
    add_gaussian_noise,
    add_salt_pepper,
    difference_image,
    psnr,
)
from .numerics import Activation, RidgeParams
from .patches import PatchConfig, aggregate_patches, extract_patches, overlap_counts
from .phantoms import shepp_logan
from .report import DenoiseReport
from .transform_baseline import TransformConfig, TransformState, tl_denoise

__all__ = [
    "Activation",
    "AutoencoderState",
    "DenoiseReport",
    "ImpulseState",
    "NoiseSpec",
    "PatchConfig",
    "RidgeParams",
    "SolverConfig",
    "TransformConfig",
    "TransformState",
    "add_gaussian_noise",
    "add_salt_pepper",
    "aggregate_patches",
    "denoise_gaussian",
    "denoise_impulse",
    "difference_image",
    "impulse_tuned_config",
    "extract_patches",
    "overlap_counts",
    "psnr",
    "shepp_logan",
    "tl_denoise",
]

__version__ = "0.1.0"
