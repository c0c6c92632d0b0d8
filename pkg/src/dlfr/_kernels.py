"""Hot SSIM kernels with a numba fast path and a pure-numpy fallback.

Set ``DLFR_DISABLE_NUMBA=1`` to force the numpy path (also used when numba is
not importable). Both paths compute the same quantities in float64; results
agree to rounding, not bit for bit.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("DLFR_DISABLE_NUMBA", "").strip().lower() not in {
    "1",
    "true",
    "yes",
    "on",
}


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# numpy path
# --------------------------------------------------------------------------


def _box_mean_np(x: np.ndarray, win: int) -> np.ndarray:
    """Mean over every valid ``win x win`` window of the last two axes."""
    h, w = x.shape[-2:]
    ii = np.zeros(x.shape[:-2] + (h + 1, w + 1), dtype=np.float64)
    np.cumsum(np.cumsum(x, axis=-2, dtype=np.float64), axis=-1, out=ii[..., 1:, 1:])
    s = ii[..., win:, win:] - ii[..., :-win, win:] - ii[..., win:, :-win] + ii[..., :-win, :-win]
    return s / float(win * win)


def _ssim_map_np(mu_a, mu_b, var_a, var_b, cov, c1, c2):
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return num / den


def ssim_pair_numpy(a: np.ndarray, b: np.ndarray, win: int, c1: float, c2: float) -> float:
    a = a.astype(np.float64)
    b = b.astype(np.float64)
    mu_a = _box_mean_np(a, win)
    mu_b = _box_mean_np(b, win)
    var_a = _box_mean_np(a * a, win) - mu_a * mu_a
    var_b = _box_mean_np(b * b, win) - mu_b * mu_b
    cov = _box_mean_np(a * b, win) - mu_a * mu_b
    return float(_ssim_map_np(mu_a, mu_b, var_a, var_b, cov, c1, c2).mean())


def ssim_matrix_numpy(frames: np.ndarray, win: int, c1: float, c2: float) -> np.ndarray:
    x = frames.astype(np.float64)
    n = x.shape[0]
    mu = _box_mean_np(x, win)
    var = _box_mean_np(x * x, win) - mu * mu
    out = np.eye(n, dtype=np.float64)
    for i in range(n - 1):
        rest = slice(i + 1, n)
        cov = _box_mean_np(x[i] * x[rest], win) - mu[i] * mu[rest]
        m = _ssim_map_np(mu[i], mu[rest], var[i], var[rest], cov, c1, c2)
        row = m.reshape(m.shape[0], -1).mean(axis=1)
        out[i, rest] = row
        out[rest, i] = row
    return out


# --------------------------------------------------------------------------
# numba path
# --------------------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True)
    def _box_mean_nb(x, win, out):
        h, w = x.shape
        ii = np.zeros((h + 1, w + 1))
        for y in range(h):
            row = 0.0
            for xx in range(w):
                row += x[y, xx]
                ii[y + 1, xx + 1] = ii[y, xx + 1] + row
        inv = 1.0 / (win * win)
        for y in range(h - win + 1):
            for xx in range(w - win + 1):
                s = ii[y + win, xx + win] - ii[y, xx + win] - ii[y + win, xx] + ii[y, xx]
                out[y, xx] = s * inv

    @njit(cache=True)
    def _frame_stats_nb(x, win):
        n, c, h, w = x.shape
        oh = h - win + 1
        ow = w - win + 1
        mu = np.empty((n, c, oh, ow))
        var = np.empty((n, c, oh, ow))
        sq = np.empty((h, w))
        for i in range(n):
            for ch in range(c):
                _box_mean_nb(x[i, ch], win, mu[i, ch])
                for y in range(h):
                    for xx in range(w):
                        sq[y, xx] = x[i, ch, y, xx] * x[i, ch, y, xx]
                _box_mean_nb(sq, win, var[i, ch])
                for y in range(oh):
                    for xx in range(ow):
                        var[i, ch, y, xx] -= mu[i, ch, y, xx] * mu[i, ch, y, xx]
        return mu, var

    @njit(cache=True)
    def _pair_score_nb(xa, xb, mu_a, mu_b, var_a, var_b, win, c1, c2, prod, cov):
        c, h, w = xa.shape
        oh = h - win + 1
        ow = w - win + 1
        acc = 0.0
        for ch in range(c):
            for y in range(h):
                for xx in range(w):
                    prod[y, xx] = xa[ch, y, xx] * xb[ch, y, xx]
            _box_mean_nb(prod, win, cov)
            for y in range(oh):
                for xx in range(ow):
                    ma = mu_a[ch, y, xx]
                    mb = mu_b[ch, y, xx]
                    cv = cov[y, xx] - ma * mb
                    num = (2.0 * ma * mb + c1) * (2.0 * cv + c2)
                    den = (ma * ma + mb * mb + c1) * (var_a[ch, y, xx] + var_b[ch, y, xx] + c2)
                    acc += num / den
        return acc / (c * oh * ow)

    @njit(cache=True)
    def _ssim_matrix_nb(x, win, c1, c2):
        n, c, h, w = x.shape
        mu, var = _frame_stats_nb(x, win)
        out = np.eye(n)
        prod = np.empty((h, w))
        cov = np.empty((h - win + 1, w - win + 1))
        for i in range(n):
            for j in range(i + 1, n):
                s = _pair_score_nb(x[i], x[j], mu[i], mu[j], var[i], var[j], win, c1, c2, prod, cov)
                out[i, j] = s
                out[j, i] = s
        return out


def ssim_matrix_numba(frames: np.ndarray, win: int, c1: float, c2: float) -> np.ndarray:
    if not HAS_NUMBA:  # pragma: no cover
        raise RuntimeError("numba is not installed")
    return _ssim_matrix_nb(np.ascontiguousarray(frames, dtype=np.float64), int(win), float(c1), float(c2))


def ssim_pair_numba(a: np.ndarray, b: np.ndarray, win: int, c1: float, c2: float) -> float:
    m = ssim_matrix_numba(np.stack([a, b]), win, c1, c2)
    return float(m[0, 1])


def ssim_matrix(frames: np.ndarray, win: int, c1: float, c2: float) -> np.ndarray:
    if USE_NUMBA:
        return ssim_matrix_numba(frames, win, c1, c2)
    return ssim_matrix_numpy(frames, win, c1, c2)


def ssim_pair(a: np.ndarray, b: np.ndarray, win: int, c1: float, c2: float) -> float:
    if USE_NUMBA:
        return ssim_pair_numba(a, b, win, c1, c2)
    return ssim_pair_numpy(a, b, win, c1, c2)
