"""Frame-rate restoration by linear blending between kept frames."""

from __future__ import annotations

import numpy as np

from .scheduler import FrameIndexMap
from .tensor import ShapeError, as_tensor, check_pixels, elementwise_lerp, same_shape


def interpolate_frame(left, right, delta: int, gap: int) -> np.ndarray:
    """Frame ``delta`` steps past ``left`` on the way to ``right`` ``gap`` steps later."""
    left = as_tensor(left)
    right = as_tensor(right)
    same_shape(left, right, "anchor frames")
    if gap < 2 or not 1 <= delta <= gap - 1:
        raise ValueError(f"need gap > 1 and 1 <= delta <= gap - 1, got delta={delta}, gap={gap}")
    return elementwise_lerp(left, right, delta / gap)


def restore_full_rate(video, fmap: FrameIndexMap) -> np.ndarray:
    """Expand one frame per segment back to the original frame count.

    Kept frames are copied unchanged. Frames inside a merged segment are
    blended towards the next kept frame; a merged final segment has no right
    anchor and repeats its kept frame.
    """
    video = check_pixels(video)
    if video.shape[0] != fmap.n_kept:
        raise ShapeError(f"video has {video.shape[0]} frames but the map keeps {fmap.n_kept}")
    out = np.empty((fmap.n_original,) + video.shape[1:], dtype=np.float32)
    last = fmap.n_kept - 1
    for j, (start, end) in enumerate(fmap.segment_spans):
        out[start] = video[j]
        gap = fmap.gaps[j]
        for i in range(start + 1, end + 1):
            if j == last:
                out[i] = video[j]
            else:
                out[i] = interpolate_frame(video[j], video[j + 1], i - start, gap)
    return out
