"""Video difference metrics and the metrics CSV format."""

from __future__ import annotations

import math

import numpy as np

from .similarity import SsimParams, ssim_frame_pair
from .tensor import ShapeError, check_pixels, same_shape

PSNR_CAP = 100.0


def psnr(a, b, peak: float = 1.0) -> float:
    a = check_pixels(a, "a")
    b = check_pixels(b, "b")
    same_shape(a, b, "videos")
    diff = a.astype(np.float64) - b.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * math.log10(peak * peak / mse))


def flicker_mae(v) -> float:
    """Mean absolute difference between consecutive frames."""
    v = check_pixels(v)
    if v.shape[0] < 2:
        raise ShapeError("flicker needs at least two frames")
    d = np.abs(np.diff(v.astype(np.float64), axis=0))
    return float(d.reshape(d.shape[0], -1).mean(axis=1).mean())


def video_ssim(a, b, params: SsimParams = SsimParams()) -> float:
    """Frame-wise SSIM between two videos, averaged over frames."""
    a = check_pixels(a, "a")
    b = check_pixels(b, "b")
    same_shape(a, b, "videos")
    return float(np.mean([ssim_frame_pair(fa, fb, params) for fa, fb in zip(a, b)]))


def compare_videos(a, b, params: SsimParams = SsimParams()) -> dict[str, float]:
    a = check_pixels(a, "a")
    b = check_pixels(b, "b")
    if a.shape != b.shape:
        raise ShapeError(f"cannot compare videos of shape {a.shape} and {b.shape}")
    return {
        "psnr": psnr(a, b),
        "ssim": video_ssim(a, b, params),
        "flicker_mae_a": flicker_mae(a) if a.shape[0] > 1 else 0.0,
        "flicker_mae_b": flicker_mae(b) if b.shape[0] > 1 else 0.0,
    }


def metrics_csv(metrics: dict[str, float]) -> str:
    lines = ["metric,value"]
    lines += [f"{name},{value:.6f}" for name, value in metrics.items()]
    return "\n".join(lines) + "\n"
