"""End-to-end baseline and dynamic latent frame-rate runs."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .codec import CodecConfig, compression_decode, compression_encode
from .cost import CostReport, DiTCostParams, baseline_cost, pipeline_cost
from .dyrope import LayerRopeAssignment, RopeConfig, RopeMode, RopeTable, layer_tables
from .flow import FlowModel, SamplerConfig, denoise_steps, gaussian_noise, one_step_preview, renoise
from .interp import restore_full_rate
from .metrics import compare_videos
from .scheduler import (
    Schedule,
    ScheduleConstraints,
    apply_schedule_pixels,
    segment_schedule,
    select_noise_frames,
)
from .similarity import SimilarityMatrix, SsimParams, similarity_matrix
from .tensor import ShapeError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    latent_shape: tuple[int, int, int, int] = (16, 4, 16, 16)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    constraints: ScheduleConstraints = field(default_factory=ScheduleConstraints)
    codec: CodecConfig = field(default_factory=CodecConfig)
    ssim: SsimParams = field(default_factory=SsimParams)
    rope: RopeConfig = field(default_factory=RopeConfig)
    layers: LayerRopeAssignment = field(default_factory=LayerRopeAssignment)
    cost: DiTCostParams = field(default_factory=DiTCostParams)
    overhead: float | None = None
    seed: int = 0
    disable_compression_module: bool = False
    skip_denoise_renoise: bool = False

    def __post_init__(self):
        if len(self.latent_shape) != 4 or min(self.latent_shape) < 1:
            raise ValueError(f"latent_shape must be four positive extents, got {self.latent_shape}")
        if self.codec.temporal_factor != 1:
            raise ValueError("the pipeline supports temporal_factor = 1 only")

    @property
    def tokens_per_frame(self) -> int:
        return self.latent_shape[2] * self.latent_shape[3]


@dataclass
class RunResult:
    video: np.ndarray
    schedule: Schedule
    cost: CostReport
    latent: np.ndarray
    artifacts: dict[str, Any] = field(default_factory=dict)
    rope_tables: dict[RopeMode, RopeTable] = field(default_factory=dict)
    layer_modes: list[RopeMode] = field(default_factory=list)
    similarity: SimilarityMatrix | None = None


def initial_noise(cfg: PipelineConfig) -> np.ndarray:
    return gaussian_noise(cfg.latent_shape, cfg.seed)


def run_baseline(model: FlowModel, cfg: PipelineConfig) -> RunResult:
    """Full-length denoising 0 -> T at the original frame rate."""
    x0 = initial_noise(cfg)
    xt = denoise_steps(x0, 0, cfg.sampler.steps, model, cfg.sampler)
    video = compression_decode(xt, cfg.codec)
    n = cfg.latent_shape[0]
    tokens = n * cfg.tokens_per_frame
    return RunResult(
        video=video,
        schedule=Schedule.identity(n, cfg.constraints.theta),
        cost=baseline_cost(tokens, cfg.sampler, cfg.cost),
        latent=xt,
    )


def run_vgdfr(model: FlowModel, cfg: PipelineConfig, keep_artifacts: bool = False) -> RunResult:
    """Denoise to step k, merge similar frames, finish in the compressed space, restore."""
    if cfg.disable_compression_module:
        return run_baseline(model, cfg)
    sampler = cfg.sampler
    k = sampler.k
    x0 = initial_noise(cfg)
    x_k = denoise_steps(x0, 0, k, model, sampler) if k > 0 else x0

    x_pre = one_step_preview(x_k, k, model, sampler)
    y_low = compression_decode(x_pre, cfg.codec)
    sim = similarity_matrix(y_low, cfg.ssim)
    sch = segment_schedule(sim, cfg.constraints)
    y_dy_low, fmap = apply_schedule_pixels(y_low, sch)

    if cfg.skip_denoise_renoise:
        # ablation: same schedule, but the codec round trip and merge act on the
        # noisy x_k itself and the result is resumed from without renoising
        y_dy_low, _ = apply_schedule_pixels(compression_decode(x_k, cfg.codec), sch)
        x_dy_k = compression_encode(y_dy_low, cfg.codec)
        x_dy_pre = x_dy_k
    else:
        x_dy_pre = compression_encode(y_dy_low, cfg.codec)
        x0_dy = select_noise_frames(x0, fmap, cfg.codec.temporal_factor)
        x_dy_k = renoise(x0_dy, x_dy_pre, k, sampler)

    h, w = x_dy_k.shape[2], x_dy_k.shape[3]
    tables, modes = layer_tables(fmap, h, w, cfg.rope, cfg.layers)
    cmodel = model.compressed(fmap)
    x_dy_t = denoise_steps(x_dy_k, k, sampler.steps, cmodel, sampler)
    decoded = compression_decode(x_dy_t, cfg.codec)
    video = restore_full_rate(decoded, fmap)

    n = cfg.latent_shape[0]
    cost = pipeline_cost(
        n * cfg.tokens_per_frame,
        sch.n_compressed * cfg.tokens_per_frame,
        sampler,
        cfg.cost,
        cfg.overhead,
    )
    log.debug("schedule %s -> %d/%d frames, speedup %.3f", sch.segments, sch.n_compressed, n, cost.speedup)
    artifacts = {}
    if keep_artifacts:
        artifacts = {
            "x_k": x_k,
            "x_pre": x_pre,
            "y_low": y_low,
            "y_dy_low": y_dy_low,
            "x_dy_pre": x_dy_pre,
            "x_dy_k": x_dy_k,
            "x_dy_t": x_dy_t,
        }
    return RunResult(
        video=video,
        schedule=sch,
        cost=cost,
        latent=x_dy_t,
        artifacts=artifacts,
        rope_tables=tables,
        layer_modes=modes,
        similarity=sim,
    )


def compare_runs(a: RunResult, b: RunResult, params: SsimParams = SsimParams()) -> dict[str, float]:
    if a.video.shape != b.video.shape:
        raise ShapeError(f"run videos differ in shape: {a.video.shape} vs {b.video.shape}")
    return compare_videos(a.video, b.video, params)
