"""Super-resolution GAN toolkit: phantoms, metrics, training, inference."""

from ._fagan import (
    bicubic_resize,
    build_dataset,
    default_config,
    evaluate_checkpoint,
    psnr,
    ssim,
    super_resolve,
    synthesize_phantom,
    train,
)

__all__ = [
    "bicubic_resize",
    "build_dataset",
    "default_config",
    "evaluate_checkpoint",
    "psnr",
    "ssim",
    "super_resolve",
    "synthesize_phantom",
    "train",
]
