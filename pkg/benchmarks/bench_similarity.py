"""Time the all-pairs SSIM matrix: numba kernel vs the pure-numpy path.

Usage: python benchmarks/bench_similarity.py [--frames 16] [--size 64] [--repeat 5]
"""

import argparse
import time

import numpy as np

from dlfr import _kernels
from dlfr.similarity import SsimParams


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--frames", type=int, default=16)
    ap.add_argument("--size", type=int, default=64)
    ap.add_argument("--channels", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    video = rng.uniform(0, 1, (args.frames, args.channels, args.size, args.size)).astype(np.float32)
    p = SsimParams()
    print(f"video {video.shape}, {args.frames * (args.frames - 1) // 2} pairs, best of {args.repeat}")

    t_np, s_np = best_of(lambda: _kernels.ssim_matrix_numpy(video, p.window, p.c1, p.c2), args.repeat)
    print(f"numpy  {t_np * 1000:9.2f} ms")
    if not _kernels.HAS_NUMBA:
        print("numba  not installed")
        return
    start = time.perf_counter()
    _kernels.ssim_matrix_numba(video[:2], p.window, p.c1, p.c2)  # compile (or load the cache)
    print(f"numba  first call {(time.perf_counter() - start) * 1000:.1f} ms")
    t_nb, s_nb = best_of(lambda: _kernels.ssim_matrix_numba(video, p.window, p.c1, p.c2), args.repeat)
    print(f"numba  {t_nb * 1000:9.2f} ms   speedup x{t_np / t_nb:.1f}")
    print(f"max |numba - numpy| = {np.max(np.abs(s_nb - s_np)):.2e}")


if __name__ == "__main__":
    main()
