"""``dlfr`` command line: gen | run | sweep | compare.

Exit codes: 0 success, 1 runtime failure, 2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .codec import compression_encode
from .config import ConfigError, RunConfig, load_config
from .flow import ConstantFlow, LinearTargetFlow, PiecewiseSceneFlow, ZeroFlow
from .metrics import compare_videos, metrics_csv
from .pipeline import PipelineConfig, RunResult, compare_runs, run_baseline, run_vgdfr
from .synth import generate_video
from .tensor import read_vgt, write_vgt

log = logging.getLogger("dlfr")


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def scenes_from_video(video: np.ndarray) -> list[int]:
    """Group runs of bit-identical consecutive frames into scenes."""
    lengths = [1]
    for a, b in zip(video[:-1], video[1:]):
        if np.array_equal(a, b):
            lengths[-1] += 1
        else:
            lengths.append(1)
    return lengths


def build_model(cfg: RunConfig):
    """Source video, target latent and flow model described by a config."""
    if cfg.video_path:
        video = read_vgt(cfg.video_path)
        if video.ndim != 4:
            raise ConfigError(f"[model] video {cfg.video_path!r} is not a rank-4 pixel video")
        scenes = scenes_from_video(video)
    else:
        video = generate_video(cfg.scene, cfg.seed)
        scenes = cfg.scene.scene_lengths()
    try:
        target = compression_encode(video, cfg.codec)
    except ValueError as exc:
        raise ConfigError(f"[codec] {exc}") from None
    if cfg.model_kind == "scene":
        model = PiecewiseSceneFlow(target, scenes, cfg.grain)
    elif cfg.model_kind == "linear":
        model = LinearTargetFlow(target)
    elif cfg.model_kind == "zero":
        model = ZeroFlow()
    else:
        model = ConstantFlow(cfg.constant)
    return video, target, model


def pipeline_config(cfg: RunConfig, latent_shape) -> PipelineConfig:
    try:
        return PipelineConfig(
            latent_shape=tuple(latent_shape),
            sampler=cfg.sampler,
            constraints=cfg.constraints,
            codec=cfg.codec,
            ssim=cfg.ssim,
            rope=cfg.rope,
            layers=cfg.layers,
            cost=cfg.cost,
            overhead=cfg.overhead,
            seed=cfg.seed,
            disable_compression_module=cfg.disable_compression,
            skip_denoise_renoise=cfg.skip_denoise_renoise,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def write_run(out_dir: Path, result: RunResult, baseline: RunResult, metrics: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_vgt(out_dir / "video.vgt", result.video)
    write_vgt(out_dir / "baseline.vgt", baseline.video)
    (out_dir / "schedule.json").write_text(result.schedule.to_json(), encoding="utf-8")
    (out_dir / "metrics.csv").write_text(metrics_csv(metrics), encoding="utf-8")
    (out_dir / "cost.json").write_text(result.cost.to_json(), encoding="utf-8")


def _load(args, theta=None, k=None) -> RunConfig:
    cfg = RunConfig() if args.config is None else load_config(args.config)
    return _override(
        cfg,
        seed=args.seed,
        theta=theta,
        k=k,
        disable_compression=getattr(args, "disable_compression", False),
        skip_denoise_renoise=getattr(args, "skip_denoise_renoise", False),
    )


def _override(cfg: RunConfig, **kw) -> RunConfig:
    try:
        return cfg.with_overrides(**kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_gen(args) -> int:
    cfg = _load(args)
    video = generate_video(cfg.scene, cfg.seed)
    write_vgt(args.out, video)
    print(f"wrote {args.out} {tuple(video.shape)}")
    return 0


def cmd_run(args) -> int:
    cfg = _load(args, theta=args.theta, k=args.k)
    _, target, model = build_model(cfg)
    pcfg = pipeline_config(cfg, target.shape)
    baseline = run_baseline(model, pcfg)
    result = run_vgdfr(model, pcfg)
    metrics = compare_runs(result, baseline, pcfg.ssim)
    metrics["speedup"] = result.cost.speedup
    write_run(Path(args.out), result, baseline, metrics)
    print(
        f"{result.schedule.n_compressed}/{result.schedule.n_original} frames kept, "
        f"speedup {result.cost.speedup:.3f}, psnr {metrics['psnr']:.3f} dB -> {args.out}"
    )
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    thetas = sorted(set(args.theta)) if args.theta else [cfg.constraints.theta]
    ks = sorted(set(args.k)) if args.k else [cfg.sampler.k]
    _, target, model = build_model(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    baseline = run_baseline(model, pipeline_config(cfg, target.shape))
    rows = ["k,theta,tokens_full,tokens_compressed,speedup,psnr"]
    for k in ks:
        for theta in thetas:
            cell = _override(cfg, k=k, theta=theta)
            pcfg = pipeline_config(cell, target.shape)
            result = run_vgdfr(model, pcfg)
            metrics = compare_runs(result, baseline, pcfg.ssim)
            metrics["speedup"] = result.cost.speedup
            write_run(out / f"k{k}_theta{theta:g}", result, baseline, metrics)
            rows.append(
                f"{k},{theta:.6f},{result.cost.tokens_full},{result.cost.tokens_compressed},"
                f"{result.cost.speedup:.6f},{metrics['psnr']:.6f}"
            )
    (out / "sweep.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    print("\n".join(rows))
    return 0


def cmd_compare(args) -> int:
    a = read_vgt(args.a)
    b = read_vgt(args.b)
    text = metrics_csv(compare_videos(a, b))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0


def _theta(text: str) -> float:
    v = float(text)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError("theta must lie in (0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dlfr", description="Dynamic latent frame-rate video generation engine")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help):
        sp.add_argument("--config", help="INI run configuration")
        sp.add_argument("--out", required=True, help=out_help)
        sp.add_argument("--seed", type=int)

    g = sub.add_parser("gen", help="write a synthetic pixel video as VGT")
    common(g, "output .vgt path")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="baseline + dynamic frame-rate run, artifacts to a directory")
    common(r, "output directory")
    r.add_argument("--theta", type=_theta)
    r.add_argument("--k", type=int)
    r.add_argument("--disable-compression", action="store_true")
    r.add_argument("--skip-denoise-renoise", action="store_true")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="grid over k and theta, one row per cell")
    common(s, "output directory")
    s.add_argument("--theta", type=_floats, help="comma-separated thresholds")
    s.add_argument("--k", type=_ints, help="comma-separated compression start steps")
    s.add_argument("--disable-compression", action="store_true")
    s.add_argument("--skip-denoise-renoise", action="store_true")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("compare", help="metrics between two VGT videos")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--out", help="write metrics CSV here as well")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"dlfr: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report any runtime failure as exit 1
        log.debug("run failed", exc_info=True)
        print(f"dlfr: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
