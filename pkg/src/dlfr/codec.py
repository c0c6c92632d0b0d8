"""Surrogate compression decoder/encoder.

Decoding maps latents in [-1, 1] affinely onto pixels in [0, 1] and upsamples
each frame by nearest-neighbour replication; encoding undoes both with average
pooling. ``encode(decode(x)) == x`` whenever no clamping happens, and the
encoder is linear, so averaging frames before or after encoding agrees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import ShapeError, as_tensor, check_latent, check_pixels


@dataclass(frozen=True)
class CodecConfig:
    spatial_factor: int = 4
    temporal_factor: int = 1

    def __post_init__(self):
        if self.spatial_factor < 1 or self.temporal_factor < 1:
            raise ValueError("codec factors must be positive integers")


def compression_decode(x, cfg: CodecConfig = CodecConfig()) -> np.ndarray:
    x = check_latent(x)
    s = cfg.spatial_factor
    y = np.clip(0.5 * x.astype(np.float64) + 0.5, 0.0, 1.0)
    y = np.repeat(np.repeat(y, s, axis=2), s, axis=3)
    if cfg.temporal_factor > 1:
        y = np.repeat(y, cfg.temporal_factor, axis=0)
    return as_tensor(y)


def compression_encode(y, cfg: CodecConfig = CodecConfig()) -> np.ndarray:
    y = check_pixels(y)
    n, c, h, w = y.shape
    s, tf = cfg.spatial_factor, cfg.temporal_factor
    if h % s or w % s:
        raise ShapeError(f"frame size {h}x{w} is not divisible by spatial factor {s}")
    if n % tf:
        raise ShapeError(f"{n} frames are not divisible by temporal factor {tf}")
    x = (y.astype(np.float64) - 0.5) * 2.0
    x = x.reshape(n, c, h // s, s, w // s, s).mean(axis=(3, 5))
    if tf > 1:
        x = x.reshape(n // tf, tf, c, h // s, w // s).mean(axis=1)
    return as_tensor(x)
