"""Greedy dynamic frame-rate schedule and its application to videos and noise.

A schedule partitions the original frames into contiguous segments. A segment
with more than one frame is only allowed when every pair of its frames has
similarity strictly above ``theta``. Each segment is represented by its first
original frame index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .similarity import SimilarityMatrix
from .tensor import ShapeError, check_latent, check_pixels, mean_over_first_axis

Segment = tuple[int, int]


@dataclass(frozen=True)
class ScheduleConstraints:
    theta: float = 0.5
    max_segment_len: int = 4
    granularity: int = 1

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")
        if self.max_segment_len < 1:
            raise ValueError("max_segment_len must be >= 1")
        if self.granularity < 1:
            raise ValueError("granularity must be >= 1")


@dataclass(frozen=True)
class Schedule:
    n_original: int
    segments: tuple[Segment, ...]
    theta: float = 1.0

    @property
    def n_compressed(self) -> int:
        return len(self.segments)

    @classmethod
    def identity(cls, n: int, theta: float = 1.0) -> "Schedule":
        return cls(n, tuple((i, i) for i in range(n)), theta)

    def is_identity(self) -> bool:
        return all(s == e for s, e in self.segments)

    def to_json(self) -> str:
        payload = {
            "n_original": self.n_original,
            "theta": self.theta,
            "segments": [[s, e] for s, e in self.segments],
        }
        return json.dumps(payload, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "Schedule":
        d = json.loads(text)
        return cls(int(d["n_original"]), tuple((int(s), int(e)) for s, e in d["segments"]), float(d["theta"]))

    def index_map(self) -> "FrameIndexMap":
        return FrameIndexMap.from_segments(self.segments)


@dataclass(frozen=True)
class FrameIndexMap:
    """Kept (representative) original indices, segment spans and restoration gaps.

    ``gaps[j]`` is the distance from kept frame ``j`` to the next kept frame;
    for the last segment it is the segment length.
    """

    kept_original_indices: tuple[int, ...]
    segment_spans: tuple[Segment, ...]
    gaps: tuple[int, ...] = field(default=())

    @classmethod
    def from_segments(cls, segments) -> "FrameIndexMap":
        spans = tuple((int(s), int(e)) for s, e in segments)
        kept = tuple(s for s, _ in spans)
        gaps = tuple(e - s + 1 for s, e in spans)
        return cls(kept, spans, gaps)

    @property
    def n_original(self) -> int:
        return self.segment_spans[-1][1] + 1 if self.segment_spans else 0

    @property
    def n_kept(self) -> int:
        return len(self.kept_original_indices)


def _segment_ok(s: np.ndarray, start: int, end: int, theta: float) -> bool:
    if end == start:
        return True
    block = s[start : end + 1, start : end + 1]
    iu = np.triu_indices(end - start + 1, k=1)
    return bool(np.all(block[iu] > theta))


def segment_schedule(sim: SimilarityMatrix, c: ScheduleConstraints) -> Schedule:
    """Greedy left-to-right, longest-first segmentation under the all-pairs rule.

    With ``granularity g > 1`` merged segments start on a multiple of ``g`` and
    span a multiple of ``g`` frames; a block that cannot merge is emitted as
    ``g`` singletons so the cursor stays aligned.
    """
    s = np.asarray(sim.s)
    n = s.shape[0]
    g = c.granularity
    segments: list[Segment] = []
    i = 0
    while i < n:
        remaining = n - i
        limit = min(c.max_segment_len, remaining)
        if g == 1:
            lengths = range(limit, 1, -1)
        else:
            lengths = [m for m in range(limit - limit % g, 1, -g)] if i % g == 0 else []
        chosen = 1
        for length in lengths:
            if _segment_ok(s, i, i + length - 1, c.theta):
                chosen = length
                break
        if chosen == 1 and g > 1:
            for j in range(i, min(i + g - i % g, n)):
                segments.append((j, j))
            i = segments[-1][1] + 1
            continue
        segments.append((i, i + chosen - 1))
        i += chosen
    return Schedule(n, tuple(segments), float(c.theta))


def verify_schedule(sim: SimilarityMatrix, sch: Schedule, theta: float) -> bool:
    """True iff ``sch`` partitions the frames and every merged segment obeys the rule."""
    s = np.asarray(sim.s)
    if sch.n_original != s.shape[0]:
        return False
    cursor = 0
    for start, end in sch.segments:
        if start != cursor or end < start or end >= sch.n_original:
            return False
        for i in range(start, end + 1):
            for j in range(i + 1, end + 1):
                if not s[i, j] > theta:
                    return False
        cursor = end + 1
    return cursor == sch.n_original


def _check_length(n: int, sch: Schedule, what: str) -> None:
    if n != sch.n_original:
        raise ShapeError(f"{what} has {n} frames but the schedule covers {sch.n_original}")


def apply_schedule(frames, sch: Schedule):
    """Average the frames of each segment; works for pixel videos and latents alike."""
    frames = check_latent(frames, "frames")
    _check_length(frames.shape[0], sch, "input")
    out = np.stack([mean_over_first_axis(list(frames[s : e + 1])) for s, e in sch.segments])
    return out, sch.index_map()


def apply_schedule_pixels(video, sch: Schedule):
    video = check_pixels(video)
    return apply_schedule(video, sch)


def select_noise_frames(x0, fmap: FrameIndexMap, temporal_factor: int = 1) -> np.ndarray:
    """Gather the latent noise frames at the kept original indices."""
    x0 = check_latent(x0, "noise")
    if temporal_factor < 1:
        raise ValueError("temporal_factor must be >= 1")
    idx = [k // temporal_factor for k in fmap.kept_original_indices]
    for k, li in zip(fmap.kept_original_indices, idx):
        if not 0 <= li < x0.shape[0]:
            raise IndexError(
                f"kept frame {k} maps to latent frame {li}, outside [0, {x0.shape[0]})"
            )
    return np.ascontiguousarray(x0[idx])
