"""Three-axis rotary position tables for compressed token grids.

Two ways to assign temporal positions once frames have been merged:

* global: kept frames keep their original (gapped) indices;
* local: kept frames are renumbered contiguously from zero.

Positions are 0-based internally. ``display_positions`` adds 1 to match the
1-based frame numbering used when talking about a clip's frames.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .scheduler import FrameIndexMap
from .tensor import ShapeError, as_tensor

DEFAULT_GLOBAL_LAYERS = (4, 19, 23, 31, 35, 36, 37, 40)


class RopeMode(enum.Enum):
    GLOBAL = "global"
    LOCAL = "local"


def default_axis_split(head_dim: int) -> tuple[int, int, int]:
    """Even three-way split of the rotation pairs; leftover pairs go to time."""
    pairs = head_dim // 2
    per = pairs // 3
    return (head_dim - 4 * per, 2 * per, 2 * per)


@dataclass(frozen=True)
class RopeConfig:
    head_dim: int = 48
    axis_split: tuple[int, int, int] | None = None
    base: float = 10000.0

    def __post_init__(self):
        if self.head_dim < 2 or self.head_dim % 2:
            raise ValueError(f"head_dim must be a positive even integer, got {self.head_dim}")
        if self.axis_split is None:
            object.__setattr__(self, "axis_split", default_axis_split(self.head_dim))
        split = tuple(int(d) for d in self.axis_split)
        if len(split) != 3 or sum(split) != self.head_dim or any(d < 0 or d % 2 for d in split):
            raise ValueError(
                f"axis split {split} must be three even extents summing to head_dim={self.head_dim}"
            )
        object.__setattr__(self, "axis_split", split)
        if self.base <= 0:
            raise ValueError("rotary base must be positive")

    def frequencies(self, axis: int) -> np.ndarray:
        d = self.axis_split[axis]
        m = np.arange(d // 2, dtype=np.float64)
        return self.base ** (-2.0 * m / d) if d else m


@dataclass(frozen=True)
class LayerRopeAssignment:
    n_layers: int = 41
    global_layers: frozenset[int] = field(default_factory=lambda: frozenset(DEFAULT_GLOBAL_LAYERS))

    def __post_init__(self):
        object.__setattr__(self, "global_layers", frozenset(int(v) for v in self.global_layers))
        bad = sorted(v for v in self.global_layers if not 0 <= v < self.n_layers)
        if bad:
            raise ValueError(f"global layers {bad} outside [0, {self.n_layers})")


@dataclass(frozen=True)
class RopeTable:
    """Per-token rotation angles; columns are [time pairs | height pairs | width pairs]."""

    angles: np.ndarray
    grid: tuple[int, int, int]

    @property
    def cos(self) -> np.ndarray:
        return np.cos(self.angles)

    @property
    def sin(self) -> np.ndarray:
        return np.sin(self.angles)

    @property
    def n_tokens(self) -> int:
        return self.angles.shape[0]


def global_rope_positions(fmap: FrameIndexMap) -> list[int]:
    return list(fmap.kept_original_indices)


def local_rope_positions(n_kept: int) -> list[int]:
    if n_kept < 1:
        raise ValueError("need at least one kept frame")
    return list(range(n_kept))


def display_positions(positions) -> list[int]:
    return [int(p) + 1 for p in positions]


def build_rope_table(time_positions, h: int, w: int, cfg: RopeConfig) -> RopeTable:
    t = np.asarray(time_positions, dtype=np.float64)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time positions must be a non-empty 1-D sequence")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time positions must be strictly increasing")
    if h < 1 or w < 1:
        raise ValueError("spatial grid must be non-empty")
    tt, hh, ww = np.meshgrid(t, np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")
    coords = np.stack([tt.reshape(-1), hh.reshape(-1), ww.reshape(-1)], axis=1)
    return RopeTable(rope_angles(coords, cfg), (len(t), h, w))


def rope_angles(coords, cfg: RopeConfig) -> np.ndarray:
    """Angles ``coord[a] * f_m`` for ``[n, 3]`` (time, height, width) coordinates."""
    coords = np.asarray(coords, dtype=np.float64).reshape(-1, 3)
    return np.concatenate([np.outer(coords[:, a], cfg.frequencies(a)) for a in range(3)], axis=1)


def apply_rotary(qk, table: RopeTable) -> np.ndarray:
    """Rotate each interleaved pair ``(x[2m], x[2m+1])`` by the token's angle ``m``."""
    qk = as_tensor(qk)
    if qk.ndim != 2:
        raise ShapeError(f"expected [n_tokens, D], got {qk.shape}")
    n, d = qk.shape
    if n != table.n_tokens or d != 2 * table.angles.shape[1]:
        raise ShapeError(
            f"qk {qk.shape} does not match table with {table.n_tokens} tokens and D={2 * table.angles.shape[1]}"
        )
    x = qk.astype(np.float64)
    even, odd = x[:, 0::2], x[:, 1::2]
    c, s = table.cos, table.sin
    out = np.empty_like(x)
    out[:, 0::2] = even * c - odd * s
    out[:, 1::2] = even * s + odd * c
    return as_tensor(out)


def layer_rope_mode(layer: int, assign: LayerRopeAssignment) -> RopeMode:
    if not 0 <= layer < assign.n_layers:
        raise IndexError(f"layer {layer} outside [0, {assign.n_layers})")
    return RopeMode.GLOBAL if layer in assign.global_layers else RopeMode.LOCAL


def layer_tables(fmap: FrameIndexMap, h: int, w: int, cfg: RopeConfig, assign: LayerRopeAssignment):
    """Both tables plus the per-layer mode list for a compressed grid."""
    tables = {
        RopeMode.GLOBAL: build_rope_table(global_rope_positions(fmap), h, w, cfg),
        RopeMode.LOCAL: build_rope_table(local_rope_positions(fmap.n_kept), h, w, cfg),
    }
    modes = [layer_rope_mode(i, assign) for i in range(assign.n_layers)]
    return tables, modes
