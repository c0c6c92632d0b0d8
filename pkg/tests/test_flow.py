import numpy as np
import pytest

from dlfr.flow import (
    ConstantFlow,
    LinearTargetFlow,
    PiecewiseSceneFlow,
    SamplerConfig,
    ZeroFlow,
    denoise_steps,
    gaussian_noise,
    one_step_preview,
    renoise,
    uniform_stream,
)
from dlfr.scheduler import Schedule
from dlfr.tensor import ShapeError

CFG = SamplerConfig(steps=50, k=5)


@pytest.fixture
def pair(rng):
    x0 = rng.standard_normal((4, 2, 4, 4)).astype(np.float32)
    target = rng.uniform(-1, 1, x0.shape).astype(np.float32)
    return x0, target


def test_zero_and_constant_flows(pair):
    x0, _ = pair
    assert np.array_equal(denoise_steps(x0, 0, 50, ZeroFlow(), CFG), x0)
    assert np.array_equal(one_step_preview(x0, 7, ZeroFlow(), CFG), x0)
    got = one_step_preview(x0, 49, ConstantFlow(2.0), CFG)
    np.testing.assert_allclose(got, x0 + 2.0 / 50, atol=1e-6)
    np.testing.assert_allclose(denoise_steps(x0, 0, 50, ConstantFlow(1.0), CFG), x0 + 1.0, atol=1e-5)


@pytest.mark.parametrize("k", [0, 5, 10, 25, 49])
def test_linear_target_preview_and_denoise(pair, k):
    x0, target = pair
    model = LinearTargetFlow(target)
    x_k = denoise_steps(x0, 0, k, model, CFG) if k else x0
    np.testing.assert_allclose(one_step_preview(x_k, k, model, CFG), target, atol=1e-5)
    np.testing.assert_allclose(denoise_steps(x_k, k, 50, model, CFG), target, atol=1e-5)


def test_denoise_composable(pair):
    x0, target = pair
    m = LinearTargetFlow(target)
    split = denoise_steps(denoise_steps(x0, 0, 17, m, CFG), 17, 40, m, CFG)
    assert np.array_equal(split, denoise_steps(x0, 0, 40, m, CFG))


def test_renoise_identities(pair):
    a, b = pair
    assert np.array_equal(renoise(a, b, 0, CFG), a)
    assert np.array_equal(renoise(a, b, 50, CFG), b)
    np.testing.assert_allclose(renoise(a, b, 25, CFG), (a.astype(np.float64) + b) / 2, atol=1e-7)
    with pytest.raises(ShapeError):
        renoise(a, b[:1], 3, CFG)
    with pytest.raises(ValueError):
        renoise(a, b, 51, CFG)


@pytest.mark.parametrize("k", [1, 5, 25, 49])
def test_renoise_lies_on_straight_path(pair, k):
    x0, target = pair
    x_k = renoise(x0, target, k, CFG)
    v = LinearTargetFlow(target).velocity(x_k, k / 50)
    np.testing.assert_allclose(v, target.astype(np.float64) - x0, atol=1e-5)


def test_sampler_validation(pair):
    x0, target = pair
    with pytest.raises(ValueError):
        SamplerConfig(steps=50, k=50)
    with pytest.raises(ValueError):
        denoise_steps(x0, 5, 5, ZeroFlow(), CFG)
    with pytest.raises(ValueError):
        one_step_preview(x0, 50, ZeroFlow(), CFG)
    with pytest.raises(ValueError):
        ZeroFlow().velocity(x0, 1.0)


def test_scene_flow_reduces_to_linear(pair):
    x0, target = pair
    a = denoise_steps(x0, 0, 50, PiecewiseSceneFlow(target, [2, 2], 0.0), CFG)
    b = denoise_steps(x0, 0, 50, LinearTargetFlow(target), CFG)
    np.testing.assert_allclose(a, b, atol=1e-5)


def test_scene_flow_reaches_endpoint(pair):
    x0, target = pair
    m = PiecewiseSceneFlow(target, [3, 1], grain=0.2)
    out = denoise_steps(x0, 0, 50, m, CFG)
    np.testing.assert_allclose(out, m.endpoint(x0), atol=1e-4)
    # frames of one scene share the anchor's grain
    np.testing.assert_allclose(out[1] - target[1], 0.2 * x0[0], atol=1e-4)
    assert m.anchors.tolist() == [0, 0, 0, 3]


def test_scene_flow_noise_recovery(pair):
    x0, target = pair
    m = PiecewiseSceneFlow(target, [2, 1, 1], grain=0.3)
    for tau in (0.0, 0.3, 0.9):
        x = (1 - tau) * x0 + tau * m.endpoint(x0)
        np.testing.assert_allclose(m.recover_noise(x, tau), x0, atol=1e-5)


def test_scene_flow_compressed_view(pair):
    _, target = pair
    m = PiecewiseSceneFlow(target, [3, 1], grain=0.1)
    fmap = Schedule(4, ((0, 1), (2, 3))).index_map()
    c = m.compressed(fmap)
    np.testing.assert_allclose(c.target[0], (target[0].astype(np.float64) + target[1]) / 2, atol=1e-6)
    assert c.scene_lengths == (2,)
    with pytest.raises(ValueError):
        PiecewiseSceneFlow(target, [3, 3])


def test_noise_deterministic_and_standard():
    a = gaussian_noise((8, 4, 16, 16), 7)
    assert a.dtype == np.float32
    assert np.array_equal(a, gaussian_noise((8, 4, 16, 16), 7))
    assert not np.array_equal(a, gaussian_noise((8, 4, 16, 16), 8))
    assert abs(a.mean()) < 0.02 and abs(a.std() - 1) < 0.02
    # the stream is counter based: a longer draw extends a shorter one
    assert np.array_equal(gaussian_noise((10,), 3), gaussian_noise((12,), 3)[:10])
    u = uniform_stream(0, 10000)
    assert u.min() > 0 and u.max() <= 1
