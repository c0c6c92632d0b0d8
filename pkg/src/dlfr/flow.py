"""Flow-matching sampling over normalized time ``tau = step / T``.

``tau = 0`` is pure noise and ``tau = 1`` is the clean endpoint. The toy
models here move every state along a straight line at constant speed, which
makes plain Euler integration exact and lets tests check the sampler to
rounding error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .scheduler import FrameIndexMap, Schedule, apply_schedule
from .tensor import ShapeError, as_tensor, check_latent, elementwise_lerp, same_shape


class FlowModel(Protocol):
    def velocity(self, x: np.ndarray, tau: float) -> np.ndarray: ...

    def compressed(self, fmap: FrameIndexMap) -> "FlowModel":
        """The same model viewed on the compressed (merged) frame axis."""
        ...


@dataclass(frozen=True)
class SamplerConfig:
    steps: int = 50
    k: int = 5

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be positive")
        if not 0 <= self.k < self.steps:
            raise ValueError(f"k must satisfy 0 <= k < steps, got k={self.k}, steps={self.steps}")


# k presets for compression after 10%, 20% and 30% of a 50-step run
K_PRESETS = {"10%": 5, "20%": 10, "30%": 15}


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not 0.0 <= tau < 1.0:
        raise ValueError(f"velocity is only defined for tau in [0, 1), got {tau}")
    return tau


class ZeroFlow:
    def velocity(self, x, tau):
        _check_tau(tau)
        return np.zeros_like(as_tensor(x))

    def compressed(self, fmap):
        return self


@dataclass(frozen=True)
class ConstantFlow:
    c: float

    def velocity(self, x, tau):
        _check_tau(tau)
        return np.full_like(as_tensor(x), self.c)

    def compressed(self, fmap):
        return self


class LinearTargetFlow:
    """Straight path to a fixed clean latent: ``v = (target - x) / (1 - tau)``."""

    def __init__(self, target):
        self.target = check_latent(target, "target")

    def velocity(self, x, tau):
        tau = _check_tau(tau)
        x = as_tensor(x)
        same_shape(x, self.target, "state and target")
        return as_tensor((self.target.astype(np.float64) - x) / (1.0 - tau))

    def compressed(self, fmap):
        merged, _ = apply_schedule(self.target, _schedule_of(fmap))
        return LinearTargetFlow(merged)


class PiecewiseSceneFlow:
    """Scene-structured straight-path flow whose endpoint depends on the noise.

    Frames are grouped into scenes (consecutive runs given by ``scene_lengths``).
    Noise ``x0`` is transported to ``target + grain * x0[anchor]`` where
    ``anchor`` is the first frame of the frame's scene, so a static scene keeps
    one shared grain pattern and every frame of a high-motion run (scenes of
    length one) gets its own. The noise behind any state is recovered exactly
    by inverting the path, so the model responds to where a state actually
    is, not only to its target. With ``grain = 0`` this reduces to
    :class:`LinearTargetFlow`.
    """

    def __init__(self, target, scene_lengths: Sequence[int] | None = None, grain: float = 0.0):
        self.target = check_latent(target, "target")
        n = self.target.shape[0]
        if scene_lengths is None:
            scene_lengths = [n]
        scene_lengths = [int(v) for v in scene_lengths]
        if any(v < 1 for v in scene_lengths) or sum(scene_lengths) != n:
            raise ValueError(f"scene lengths {scene_lengths} must be positive and sum to {n}")
        self.scene_lengths = tuple(scene_lengths)
        self.grain = float(grain)
        self._anchor = np.repeat(np.cumsum([0] + scene_lengths[:-1]), scene_lengths)

    @property
    def anchors(self) -> np.ndarray:
        return self._anchor

    def endpoint(self, x0) -> np.ndarray:
        x0 = as_tensor(x0)
        return as_tensor(self.target + self.grain * x0[self._anchor])

    def recover_noise(self, x, tau: float) -> np.ndarray:
        """Invert ``x = (1 - tau) x0 + tau * endpoint(x0)`` for ``x0``."""
        x = np.asarray(x, dtype=np.float64)
        base = x - tau * self.target
        is_anchor = self._anchor == np.arange(len(self._anchor))
        x0 = np.empty_like(base)
        x0[is_anchor] = base[is_anchor] / (1.0 - tau + tau * self.grain)
        rest = ~is_anchor
        x0[rest] = (base[rest] - tau * self.grain * x0[self._anchor[rest]]) / (1.0 - tau)
        return x0

    def velocity(self, x, tau):
        tau = _check_tau(tau)
        x = as_tensor(x)
        same_shape(x, self.target, "state and target")
        x0 = self.recover_noise(x, tau)
        return as_tensor(self.target + self.grain * x0[self._anchor] - x0)

    def compressed(self, fmap):
        merged, _ = apply_schedule(self.target, _schedule_of(fmap))
        scene_of = np.repeat(np.arange(len(self.scene_lengths)), self.scene_lengths)
        kept_scenes = scene_of[list(fmap.kept_original_indices)]
        # consecutive kept frames from the same scene stay one scene
        lengths: list[int] = []
        prev = None
        for sc in kept_scenes:
            if sc == prev:
                lengths[-1] += 1
            else:
                lengths.append(1)
            prev = sc
        return PiecewiseSceneFlow(merged, lengths, self.grain)


def _schedule_of(fmap: FrameIndexMap) -> Schedule:
    return Schedule(fmap.n_original, fmap.segment_spans)


# --------------------------------------------------------------------------
# sampler
# --------------------------------------------------------------------------


def denoise_steps(x, from_step: int, to_step: int, model: FlowModel, cfg: SamplerConfig) -> np.ndarray:
    """Explicit Euler: ``x += v(x, s/T) / T`` for ``s = from_step .. to_step - 1``."""
    x = check_latent(x)
    if not 0 <= from_step < to_step <= cfg.steps:
        raise ValueError(
            f"need 0 <= from_step < to_step <= {cfg.steps}, got {from_step} -> {to_step}"
        )
    dt = 1.0 / cfg.steps
    for s in range(from_step, to_step):
        v = model.velocity(x, s / cfg.steps)
        if v.shape != x.shape:
            raise ShapeError(f"model returned velocity of shape {v.shape} for state {x.shape}")
        x = as_tensor(x + v * np.float32(dt))
    return x


def one_step_preview(x_k, k: int, model: FlowModel, cfg: SamplerConfig) -> np.ndarray:
    """Single Euler jump from step ``k`` straight to the clean endpoint."""
    x_k = check_latent(x_k)
    if not 0 <= k < cfg.steps:
        raise ValueError(f"preview step k={k} must satisfy 0 <= k < {cfg.steps}")
    horizon = (cfg.steps - k) / cfg.steps
    v = model.velocity(x_k, k / cfg.steps)
    return as_tensor(x_k + v.astype(np.float64) * horizon)


def renoise(x0_dy, x_dy_pre, k: int, cfg: SamplerConfig) -> np.ndarray:
    """Place a clean compressed latent back on the noise path at step ``k``."""
    if not 0 <= k <= cfg.steps:
        raise ValueError(f"renoise step k={k} outside [0, {cfg.steps}]")
    x0_dy = as_tensor(x0_dy)
    x_dy_pre = as_tensor(x_dy_pre)
    same_shape(x0_dy, x_dy_pre, "renoise operands")
    return elementwise_lerp(x0_dy, x_dy_pre, k / cfg.steps)


# --------------------------------------------------------------------------
# noise
# --------------------------------------------------------------------------

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer: xorshift-multiply rounds
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniform_stream(seed: int, count: int) -> np.ndarray:
    """``count`` uniforms in (0, 1], element ``i`` = mix64(seed + (i + 1) * golden)."""
    with np.errstate(over="ignore"):
        ctr = np.arange(1, count + 1, dtype=np.uint64) * _GOLDEN + np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
        bits = _mix64(ctr)
    return ((bits >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def gaussian_noise(shape, seed: int) -> np.ndarray:
    """Seeded standard normal float32 tensor (Box-Muller over the counter stream)."""
    n = int(np.prod(shape))
    u = uniform_stream(seed, 2 * ((n + 1) // 2))
    u1, u2 = u[0::2], u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(len(u))
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    return as_tensor(z[:n].reshape(shape))
