import numpy as np
import pytest

from dlfr.cost import DiTCostParams, baseline_cost, default_overhead, pipeline_cost, step_cost
from dlfr.flow import SamplerConfig
from dlfr.metrics import compare_videos, flicker_mae, metrics_csv, psnr
from dlfr.tensor import ShapeError
from oracles import scalar_psnr, scalar_step_cost

QUAD = DiTCostParams(n_layers=1, model_dim=1, attn_coef=2.0, lin_coef=0.0)


def test_step_cost_examples():
    assert step_cost(1, DiTCostParams(n_layers=1, model_dim=1)) == 14
    assert step_cost(200, QUAD) == 4 * step_cost(100, QUAD)


def test_step_cost_matches_scalar(rng):
    for _ in range(50):
        L, d, n, txt = (int(v) for v in rng.integers(1, 64, size=4))
        a, c = rng.uniform(0.5, 4, size=2)
        p = DiTCostParams(L, d, a, c, txt)
        assert step_cost(n, p) == pytest.approx(scalar_step_cost(n, L, d, a, c, txt), rel=1e-12)


def test_step_cost_additive_and_increasing():
    p = DiTCostParams(n_layers=7)
    assert step_cost(500, DiTCostParams(n_layers=14)) == 2 * step_cost(500, p)
    costs = [step_cost(n, p) for n in range(1, 50)]
    assert all(a < b for a, b in zip(costs, costs[1:]))


def test_no_compression_is_unit_speedup():
    r = pipeline_cost(1024, 1024, SamplerConfig(), DiTCostParams(), overhead=0.0)
    assert r.speedup == 1.0
    assert baseline_cost(1024, SamplerConfig(), DiTCostParams()).speedup == 1.0


def test_closed_form_quadratic_ratio():
    r = pipeline_cost(1000, 500, SamplerConfig(50, 5), QUAD, overhead=0.0)
    assert r.speedup == pytest.approx(50 / (5 + 45 * 0.25), abs=1e-12)
    assert r.speedup == pytest.approx(3.0769, abs=1e-4)


def test_report_split_adds_up():
    p = DiTCostParams()
    r = pipeline_cost(4096, 2048, SamplerConfig(50, 10), p)
    assert r.overhead_flops == default_overhead(4096, p)
    assert r.vgdfr_flops == pytest.approx(r.pre_flops + r.overhead_flops + r.compressed_flops)
    assert r.speedup == pytest.approx(r.baseline_flops / r.vgdfr_flops)
    assert '"speedup"' in r.to_json()


def test_speedup_monotone():
    p = DiTCostParams()
    by_n = [pipeline_cost(4096, n, SamplerConfig(50, 5), p).speedup for n in range(256, 4097, 256)]
    assert all(a >= b for a, b in zip(by_n, by_n[1:]))
    by_k = [pipeline_cost(4096, 2048, SamplerConfig(50, k), p).speedup for k in range(0, 50)]
    assert all(a >= b for a, b in zip(by_k, by_k[1:]))


def test_overhead_can_sink_speedup():
    r = pipeline_cost(100, 99, SamplerConfig(50, 5), DiTCostParams(), overhead=1e18)
    assert 0 < r.speedup < 1
    with pytest.raises(ValueError):
        pipeline_cost(100, 101, SamplerConfig(), DiTCostParams())


def test_psnr_examples(rng):
    a = rng.uniform(0, 1, (2, 1, 4, 4)).astype(np.float32)
    assert psnr(a, a) == 100.0
    z = np.zeros((1, 1, 4, 4), np.float32)
    assert psnr(z, z + 0.1) == pytest.approx(20.0, abs=1e-5)
    b = rng.uniform(0, 1, a.shape).astype(np.float32)
    assert psnr(a, b) == pytest.approx(scalar_psnr(a, b), abs=1e-9)
    assert psnr(a, b) == psnr(b, a)
    with pytest.raises(ShapeError):
        psnr(a, b[:1])


def test_flicker_examples():
    const = np.full((4, 1, 2, 2), 0.3, np.float32)
    assert flicker_mae(const) == 0.0
    alt = np.stack([np.full((1, 2, 2), i % 2, np.float32) for i in range(6)])
    assert flicker_mae(alt) == 1.0
    ramp = np.stack([np.full((1, 2, 2), i / 4, np.float32) for i in range(5)])
    assert flicker_mae(ramp) == pytest.approx(0.25)
    with pytest.raises(ShapeError):
        flicker_mae(const[:1])


def test_compare_and_csv(rng):
    a = rng.uniform(0, 1, (3, 1, 8, 8)).astype(np.float32)
    m = compare_videos(a, a)
    assert m["psnr"] == 100.0 and m["ssim"] == pytest.approx(1.0)
    text = metrics_csv(m)
    assert text.splitlines()[0] == "metric,value"
    assert "psnr,100.000000" in text
