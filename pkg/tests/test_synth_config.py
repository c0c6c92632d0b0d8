import numpy as np
import pytest

from dlfr.config import PRESETS, ConfigError, RunConfig, parse_config
from dlfr.metrics import flicker_mae
from dlfr.similarity import ssim_frame_pair
from dlfr.synth import SceneSegment, SyntheticSceneSpec, generate_video


def test_segment_parse():
    assert SceneSegment.parse("moving_square:8:2") == SceneSegment(8, "moving_square", 2.0)
    assert SceneSegment.parse("static:4") == SceneSegment(4, "static", 0.0)
    with pytest.raises(ValueError):
        SceneSegment.parse("wobble:4")
    with pytest.raises(ValueError):
        SceneSegment.parse("static")


def test_spec_validation():
    with pytest.raises(ValueError):
        SyntheticSceneSpec(n_frames=5)
    assert SyntheticSceneSpec().scene_lengths() == [8] + [1] * 8


def test_static_video_has_no_flicker():
    spec = SyntheticSceneSpec(n_frames=6, segments=(SceneSegment(6, "static"),))
    assert flicker_mae(generate_video(spec)) == 0.0


def test_moving_square_less_similar_than_static():
    spec = SyntheticSceneSpec(
        n_frames=16, segments=(SceneSegment(8, "static"), SceneSegment(8, "moving_square", 2.0))
    )
    v = generate_video(spec)
    static = ssim_frame_pair(v[0], v[1])
    moving = np.mean([ssim_frame_pair(v[i], v[i + 1]) for i in range(8, 15)])
    assert moving < static


def test_generate_deterministic_and_seeded():
    spec = SyntheticSceneSpec(n_frames=4, height=16, width=16, square=4, segments=(SceneSegment(4, "noise", 0.1),))
    a = generate_video(spec, 1)
    assert np.array_equal(a, generate_video(spec, 1))
    assert not np.array_equal(a, generate_video(spec, 2))
    assert a.min() >= 0 and a.max() <= 1


def test_presets_cover_grid():
    assert PRESETS["k5-theta05"] == (5, 0.5)
    assert PRESETS["k15-theta09"] == (15, 0.9)
    assert len(PRESETS) == 15


def test_parse_full_config():
    cfg = parse_config(
        """
        [pipeline]
        preset = k10-theta07
        seed = 4
        [schedule]
        max_segment_len = 3
        [rope]
        axis_split = 16, 16, 16
        [model]
        kind = linear   # comment
        [scene]
        frames = 8
        segments = static:4, moving_square:4:8
        """
    )
    assert (cfg.sampler.k, cfg.constraints.theta) == (10, 0.7)
    assert cfg.seed == 4 and cfg.constraints.max_segment_len == 3
    assert cfg.model_kind == "linear"
    assert cfg.scene.segments[1] == SceneSegment(4, "moving_square", 8.0)
    assert parse_config("[pipeline]\npreset = k5-theta09\nk = 15\n").sampler.k == 15


@pytest.mark.parametrize(
    "text, needle",
    [
        ("[bogus]\nx = 1\n", "unknown section"),
        ("[pipeline]\nspeed = 1\n", "unknown key"),
        ("[pipeline]\nk = five\n", "[pipeline] k"),
        ("[pipeline]\ntheta = 1.5\n", "theta"),
        ("[pipeline]\npreset = k7\n", "preset"),
        ("[model]\nkind = magic\n", "kind"),
        ("[pipeline]\ndisable_compression = perhaps\n", "boolean"),
        ("[scene]\nheight = 30\n", "divisible"),
        ("no header\n", ""),
    ],
)
def test_config_errors_name_the_field(text, needle):
    with pytest.raises(ConfigError) as info:
        parse_config(text, "run.ini")
    assert needle in str(info.value)


def test_overrides():
    cfg = RunConfig().with_overrides(seed=3, theta=0.8, k=10, disable_compression=True)
    assert (cfg.seed, cfg.constraints.theta, cfg.sampler.k, cfg.disable_compression) == (3, 0.8, 10, True)
    assert RunConfig().seed == 0
