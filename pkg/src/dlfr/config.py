"""INI-style run configuration.

Grammar: ``[section]`` headers followed by ``key = value`` lines; ``#`` and
``;`` start comments. Recognised sections and keys::

    [pipeline]  preset, steps, k, theta, seed, disable_compression,
                skip_denoise_renoise
    [schedule]  max_segment_len, granularity
    [codec]     spatial_factor, temporal_factor
    [ssim]      window, k1, k2, dynamic_range
    [rope]      head_dim, axis_split (t,h,w), base, n_layers, global_layers
    [cost]      n_layers, model_dim, attn_coef, lin_coef, text_tokens, overhead
    [model]     kind (scene | linear | zero | constant), grain, value, video
    [scene]     frames, height, width, channels, square,
                segments (comma list of motion:length[:amount])

Every key is optional. ``preset`` selects one of :data:`PRESETS` and explicit
``k``/``theta`` keys override it.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, replace

from .codec import CodecConfig
from .cost import DiTCostParams
from .dyrope import LayerRopeAssignment, RopeConfig
from .flow import SamplerConfig
from .scheduler import ScheduleConstraints
from .similarity import SsimParams
from .synth import SceneSegment, SyntheticSceneSpec

# the (k, theta) grid of the reference experiments, T = 50
PRESETS = {
    f"k{k}-theta{str(t).replace('.', '')}": (k, t)
    for k in (5, 10, 15)
    for t in (0.5, 0.6, 0.7, 0.8, 0.9)
}

MODEL_KINDS = ("scene", "linear", "zero", "constant")

_KNOWN = {
    "pipeline": {"preset", "steps", "k", "theta", "seed", "disable_compression", "skip_denoise_renoise"},
    "schedule": {"max_segment_len", "granularity"},
    "codec": {"spatial_factor", "temporal_factor"},
    "ssim": {"window", "k1", "k2", "dynamic_range"},
    "rope": {"head_dim", "axis_split", "base", "n_layers", "global_layers"},
    "cost": {"n_layers", "model_dim", "attn_coef", "lin_coef", "text_tokens", "overhead"},
    "model": {"kind", "grain", "value", "video"},
    "scene": {"frames", "height", "width", "channels", "square", "segments"},
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the file, section and key."""


@dataclass
class RunConfig:
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    constraints: ScheduleConstraints = field(default_factory=ScheduleConstraints)
    codec: CodecConfig = field(default_factory=CodecConfig)
    ssim: SsimParams = field(default_factory=SsimParams)
    rope: RopeConfig = field(default_factory=RopeConfig)
    layers: LayerRopeAssignment = field(default_factory=LayerRopeAssignment)
    cost: DiTCostParams = field(default_factory=DiTCostParams)
    overhead: float | None = None
    seed: int = 0
    disable_compression: bool = False
    skip_denoise_renoise: bool = False
    model_kind: str = "scene"
    grain: float = 0.1
    constant: float = 0.0
    video_path: str | None = None
    scene: SyntheticSceneSpec = field(default_factory=SyntheticSceneSpec)

    def with_overrides(self, *, seed=None, theta=None, k=None, disable_compression=None, skip_denoise_renoise=None):
        cfg = replace(self)
        if seed is not None:
            cfg.seed = int(seed)
        if theta is not None:
            cfg.constraints = replace(cfg.constraints, theta=float(theta))
        if k is not None:
            cfg.sampler = replace(cfg.sampler, k=int(k))
        if disable_compression:
            cfg.disable_compression = True
        if skip_denoise_renoise:
            cfg.skip_denoise_renoise = True
        return cfg


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.replace(" ", "").split(",") if v]


class _Reader:
    def __init__(self, parser: configparser.ConfigParser, source: str):
        self.p = parser
        self.source = source

    def get(self, section, key, conv, default):
        if not self.p.has_option(section, key):
            return default
        raw = self.p.get(section, key)
        try:
            return conv(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{self.source}: [{section}] {key} = {raw!r}: {exc}") from None

    def boolean(self, section, key, default):
        if not self.p.has_option(section, key):
            return default
        try:
            return self.p.getboolean(section, key)
        except ValueError:
            raw = self.p.get(section, key)
            raise ConfigError(f"{self.source}: [{section}] {key} = {raw!r}: expected a boolean") from None


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc).replace("\n", " ")) from None

    for section in parser.sections():
        if section not in _KNOWN:
            raise ConfigError(f"{source}: unknown section [{section}]")
        for key in parser.options(section):
            if key not in _KNOWN[section]:
                raise ConfigError(f"{source}: [{section}] unknown key {key!r}")

    r = _Reader(parser, source)

    def build(section, make):
        try:
            return make()
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{source}: [{section}] {exc}") from None

    preset = r.get("pipeline", "preset", str, None)
    k_default, theta_default = 5, 0.5
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"{source}: [pipeline] preset {preset!r} unknown; choose from {sorted(PRESETS)}")
        k_default, theta_default = PRESETS[preset]

    sampler = build("pipeline", lambda: SamplerConfig(
        r.get("pipeline", "steps", int, 50), r.get("pipeline", "k", int, k_default)))
    constraints = build("schedule", lambda: ScheduleConstraints(
        r.get("pipeline", "theta", float, theta_default),
        r.get("schedule", "max_segment_len", int, 4),
        r.get("schedule", "granularity", int, 1)))
    codec = build("codec", lambda: CodecConfig(
        r.get("codec", "spatial_factor", int, 4), r.get("codec", "temporal_factor", int, 1)))
    ssim = build("ssim", lambda: SsimParams(
        r.get("ssim", "window", int, 7), r.get("ssim", "k1", float, 0.01),
        r.get("ssim", "k2", float, 0.03), r.get("ssim", "dynamic_range", float, 1.0)))
    rope = build("rope", lambda: RopeConfig(
        r.get("rope", "head_dim", int, 48),
        r.get("rope", "axis_split", lambda s: tuple(_int_list(s)), None),
        r.get("rope", "base", float, 10000.0)))
    layers = build("rope", lambda: LayerRopeAssignment(
        r.get("rope", "n_layers", int, 41),
        r.get("rope", "global_layers", _int_list, [4, 19, 23, 31, 35, 36, 37, 40])))
    cost = build("cost", lambda: DiTCostParams(
        r.get("cost", "n_layers", int, 40), r.get("cost", "model_dim", int, 3072),
        r.get("cost", "attn_coef", float, 2.0), r.get("cost", "lin_coef", float, 12.0),
        r.get("cost", "text_tokens", int, 0)))
    overhead = r.get("cost", "overhead", float, None)
    if overhead is not None and overhead < 0:
        raise ConfigError(f"{source}: [cost] overhead must be non-negative")

    kind = r.get("model", "kind", str, "scene")
    if kind not in MODEL_KINDS:
        raise ConfigError(f"{source}: [model] kind {kind!r} unknown; choose from {MODEL_KINDS}")

    def make_scene():
        segments = r.get("scene", "segments", lambda s: tuple(SceneSegment.parse(p) for p in s.split(",") if p.strip()), None)
        kwargs = {}
        if segments is not None:
            kwargs["segments"] = segments
        return SyntheticSceneSpec(
            n_frames=r.get("scene", "frames", int, 16),
            height=r.get("scene", "height", int, 64),
            width=r.get("scene", "width", int, 64),
            channels=r.get("scene", "channels", int, 4),
            square=r.get("scene", "square", int, 24),
            **kwargs,
        )

    scene = build("scene", make_scene)
    if scene.height % codec.spatial_factor or scene.width % codec.spatial_factor:
        raise ConfigError(f"{source}: [scene] {scene.height}x{scene.width} not divisible by [codec] spatial_factor")

    return RunConfig(
        sampler=sampler,
        constraints=constraints,
        codec=codec,
        ssim=ssim,
        rope=rope,
        layers=layers,
        cost=cost,
        overhead=overhead,
        seed=r.get("pipeline", "seed", int, 0),
        disable_compression=r.boolean("pipeline", "disable_compression", False),
        skip_denoise_renoise=r.boolean("pipeline", "skip_denoise_renoise", False),
        model_kind=kind,
        grain=r.get("model", "grain", float, 0.1),
        constant=r.get("model", "value", float, 0.0),
        video_path=r.get("model", "video", str, None),
        scene=scene,
    )


def load_config(path: str | os.PathLike) -> RunConfig:
    path = os.fspath(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    return parse_config(text, source=path)
