"""Deterministic synthetic videos with alternating static and high-motion runs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .flow import gaussian_noise
from .tensor import as_tensor

MOTIONS = ("static", "moving_square", "noise")


@dataclass(frozen=True)
class SceneSegment:
    length: int
    motion: str = "static"
    amount: float = 0.0  # pixels per frame for moving_square, sigma for noise

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("segment length must be >= 1")
        if self.motion not in MOTIONS:
            raise ValueError(f"unknown motion {self.motion!r}; expected one of {MOTIONS}")
        if self.amount < 0:
            raise ValueError("segment amount must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "SceneSegment":
        """Parse ``motion:length[:amount]``, e.g. ``moving_square:8:2``."""
        parts = [p.strip() for p in text.split(":")]
        if len(parts) not in (2, 3):
            raise ValueError(f"bad segment {text!r}; expected motion:length[:amount]")
        amount = float(parts[2]) if len(parts) == 3 else 0.0
        return cls(int(parts[1]), parts[0], amount)


@dataclass(frozen=True)
class SyntheticSceneSpec:
    n_frames: int = 16
    height: int = 64
    width: int = 64
    channels: int = 4
    segments: tuple[SceneSegment, ...] = field(
        default_factory=lambda: (SceneSegment(8, "static"), SceneSegment(8, "moving_square", 8.0))
    )
    square: int = 24

    def __post_init__(self):
        total = sum(s.length for s in self.segments)
        if total != self.n_frames:
            raise ValueError(f"segment lengths sum to {total}, expected n_frames={self.n_frames}")
        if min(self.height, self.width, self.channels) < 1:
            raise ValueError("resolution and channels must be positive")
        if not 1 <= self.square <= min(self.height, self.width):
            raise ValueError("square size must fit in the frame")

    def scene_lengths(self) -> list[int]:
        """Scene partition: a static run is one scene, every moving frame its own."""
        out: list[int] = []
        for seg in self.segments:
            if seg.motion == "static":
                out.append(seg.length)
            else:
                out.extend([1] * seg.length)
        return out


def _background(spec: SyntheticSceneSpec) -> np.ndarray:
    y = np.arange(spec.height)[:, None] / spec.height
    x = np.arange(spec.width)[None, :] / spec.width
    chans = [
        0.5 + 0.12 * np.sin(2 * np.pi * (x + 0.25 * c)) * np.cos(2 * np.pi * (y - 0.1 * c))
        for c in range(spec.channels)
    ]
    return np.stack(chans)


def generate_video(spec: SyntheticSceneSpec, seed: int = 0) -> np.ndarray:
    """Pixel video ``[N, C, H, W]`` in [0.2, 0.8] (noise runs are clipped to [0, 1]).

    A bright square sits on a smooth background. Static runs hold it still;
    ``moving_square`` runs move it right by ``amount`` pixels per frame
    (wrapping), starting from the pose the previous run left it in; ``noise``
    runs hold it still and add Gaussian noise.
    """
    bg = _background(spec)
    frames = []
    pos = float((spec.width - spec.square) // 2)
    top = (spec.height - spec.square) // 2
    level = 0.78 - 0.04 * np.arange(spec.channels)[:, None, None]
    for si, seg in enumerate(spec.segments):
        noise = None
        if seg.motion == "noise":
            shape = (seg.length, spec.channels, spec.height, spec.width)
            noise = gaussian_noise(shape, seed * 1000003 + si)
        for j in range(seg.length):
            if seg.motion == "moving_square" and j > 0:
                pos += seg.amount
            f = bg.copy()
            cols = (int(round(pos)) + np.arange(spec.square)) % spec.width
            f[:, top : top + spec.square, cols] = level
            if noise is not None:
                f = np.clip(f + seg.amount * noise[j], 0.0, 1.0)
            frames.append(f)
        if seg.motion == "moving_square":
            pos += seg.amount
    return as_tensor(np.stack(frames))
