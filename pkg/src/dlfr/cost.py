"""FLOP cost model for DiT denoising and the modeled pipeline speedup."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .flow import SamplerConfig


@dataclass(frozen=True)
class DiTCostParams:
    n_layers: int = 40
    model_dim: int = 3072
    attn_coef: float = 2.0
    lin_coef: float = 12.0
    text_tokens: int = 0

    def __post_init__(self):
        if self.n_layers < 1 or self.model_dim < 1:
            raise ValueError("n_layers and model_dim must be positive")
        if self.attn_coef < 0 or self.lin_coef < 0 or self.text_tokens < 0:
            raise ValueError("cost coefficients and text_tokens must be non-negative")


def step_cost(n_tokens: int, p: DiTCostParams) -> float:
    """FLOPs of one DiT forward pass over ``n_tokens`` video tokens."""
    if n_tokens < 1:
        raise ValueError("n_tokens must be >= 1")
    n = float(n_tokens + p.text_tokens)
    d = float(p.model_dim)
    return p.n_layers * (p.attn_coef * n * n * d + p.lin_coef * n * d * d)


def default_overhead(n_full: int, p: DiTCostParams) -> float:
    """One extra full step for the preview plus two codec passes."""
    return step_cost(n_full, p) + 2.0 * p.lin_coef * n_full * p.model_dim


@dataclass(frozen=True)
class CostReport:
    steps: int
    k: int
    tokens_full: int
    tokens_compressed: int
    baseline_flops: float
    pre_flops: float
    overhead_flops: float
    compressed_flops: float
    vgdfr_flops: float
    speedup: float

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def pipeline_cost(
    n_full: int,
    n_compressed: int,
    cfg: SamplerConfig,
    p: DiTCostParams,
    overhead: float | None = None,
) -> CostReport:
    if not 1 <= n_compressed <= n_full:
        raise ValueError(f"need 1 <= n_compressed <= n_full, got {n_compressed} > {n_full}")
    if overhead is None:
        overhead = default_overhead(n_full, p)
    full = step_cost(n_full, p)
    baseline = cfg.steps * full
    pre = cfg.k * full
    compressed = (cfg.steps - cfg.k) * step_cost(n_compressed, p)
    total = pre + overhead + compressed
    return CostReport(
        steps=cfg.steps,
        k=cfg.k,
        tokens_full=n_full,
        tokens_compressed=n_compressed,
        baseline_flops=baseline,
        pre_flops=pre,
        overhead_flops=float(overhead),
        compressed_flops=compressed,
        vgdfr_flops=total,
        speedup=baseline / total,
    )


def baseline_cost(n_full: int, cfg: SamplerConfig, p: DiTCostParams) -> CostReport:
    return pipeline_cost(n_full, n_full, cfg, p, overhead=0.0)
