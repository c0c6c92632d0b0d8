"""Frame similarity: uniform-window SSIM and the all-pairs similarity matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .tensor import ShapeError, as_tensor, check_pixels, same_shape


@dataclass(frozen=True)
class SsimParams:
    """Uniform ``window x window`` SSIM with stabilizers ``(k1 L)^2`` and ``(k2 L)^2``."""

    window: int = 7
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError(f"SSIM window must be a positive odd integer, got {self.window}")
        if self.k1 <= 0 or self.k2 <= 0 or self.dynamic_range <= 0:
            raise ValueError("SSIM constants k1, k2 and dynamic_range must be positive")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2

    def check_frame(self, h: int, w: int) -> None:
        if self.window > min(h, w):
            raise ShapeError(f"SSIM window {self.window} exceeds frame size {h}x{w}")


def ssim_frame_pair(a, b, params: SsimParams = SsimParams()) -> float:
    """Mean SSIM of two ``[C, H, W]`` frames over channels and valid windows.

    Window statistics use population (1/n) moments; no padding is applied.
    """
    a = as_tensor(a)
    b = as_tensor(b)
    same_shape(a, b, "frames")
    if a.ndim != 3:
        raise ShapeError(f"frames must be [C, H, W], got {a.shape}")
    params.check_frame(a.shape[1], a.shape[2])
    return _kernels.ssim_pair(a, b, params.window, params.c1, params.c2)


@dataclass(frozen=True)
class SimilarityMatrix:
    s: np.ndarray

    @property
    def n(self) -> int:
        return self.s.shape[0]

    def __getitem__(self, ij):
        return self.s[ij]


def similarity_matrix(video, params: SsimParams = SsimParams()) -> SimilarityMatrix:
    """All-pairs SSIM of the frames of ``video``; only the upper triangle is evaluated."""
    video = check_pixels(video)
    params.check_frame(video.shape[2], video.shape[3])
    s = _kernels.ssim_matrix(video, params.window, params.c1, params.c2)
    np.clip(s, -1.0, 1.0, out=s)
    return SimilarityMatrix(s)
