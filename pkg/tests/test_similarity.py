import numpy as np
import pytest

from dlfr import _kernels
from dlfr.similarity import SsimParams, similarity_matrix, ssim_frame_pair
from dlfr.tensor import ShapeError
from oracles import scalar_ssim


def _frames(rng, n=3, c=2, h=10, w=9):
    return rng.uniform(0, 1, (n, c, h, w)).astype(np.float32)


def test_pair_matches_scalar_oracle(rng):
    v = _frames(rng)
    for a, b in [(0, 1), (1, 2), (0, 0)]:
        assert ssim_frame_pair(v[a], v[b]) == pytest.approx(scalar_ssim(v[a], v[b]), abs=1e-6)


def test_constant_frames_closed_form():
    a = np.zeros((1, 8, 8), np.float32)
    b = np.ones((1, 8, 8), np.float32)
    c1 = 1e-4
    # means 0 and 1, zero variance: (c1)(c2) / ((1 + c1)(c2))
    assert ssim_frame_pair(a, b) == pytest.approx(c1 / (1 + c1), rel=1e-6)


def test_matrix_symmetric_unit_diagonal(rng):
    s = similarity_matrix(_frames(rng, n=5)).s
    np.testing.assert_allclose(s, s.T, atol=1e-12)
    np.testing.assert_allclose(np.diag(s), 1.0, atol=1e-9)
    assert np.all(s <= 1.0) and np.all(s >= -1.0)


def test_matrix_entries_match_pairs(rng):
    v = _frames(rng, n=4)
    s = similarity_matrix(v)
    for i in range(4):
        for j in range(4):
            assert s[i, j] == pytest.approx(ssim_frame_pair(v[i], v[j]), abs=1e-9)


def _placed(content, top, left, size=40):
    canvas = np.full((content.shape[0], size, size), 0.5, np.float32)
    h, w = content.shape[1:]
    canvas[:, top : top + h, left : left + w] = content
    return canvas


def test_translation_invariance(rng):
    # content on a shared flat background: windows away from it score exactly 1
    # wherever the content sits, so moving both frames by whole windows is invisible
    a, b = rng.uniform(0, 1, (2, 2, 10, 10)).astype(np.float32)
    ref = ssim_frame_pair(_placed(a, 8, 8), _placed(b, 8, 8))
    for dy, dx in [(7, 0), (0, 7), (7, 14)]:
        moved = ssim_frame_pair(_placed(a, 8 + dy, 8 + dx), _placed(b, 8 + dy, 8 + dx))
        assert moved == pytest.approx(ref, abs=1e-6)


def test_monotone_under_noise(rng):
    f = _frames(rng, n=1)[0]
    scores = []
    for sigma in (0.01, 0.05, 0.1, 0.2):
        g = f + sigma * rng.standard_normal(f.shape).astype(np.float32)
        scores.append(ssim_frame_pair(f, g))
    assert all(a > b for a, b in zip(scores, scores[1:]))


def test_small_frame_rejected():
    with pytest.raises(ShapeError):
        ssim_frame_pair(np.zeros((1, 6, 6)), np.zeros((1, 6, 6)))


def test_params_validation():
    with pytest.raises(ValueError):
        SsimParams(window=0)


@pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba not installed")
def test_numba_matches_numpy(rng):
    v = rng.uniform(0, 1, (6, 3, 16, 16))
    p = SsimParams()
    a = _kernels.ssim_matrix_numba(v, p.window, p.c1, p.c2)
    b = _kernels.ssim_matrix_numpy(v, p.window, p.c1, p.c2)
    np.testing.assert_allclose(a, b, atol=1e-9)
    assert _kernels.ssim_pair_numba(v[0], v[1], p.window, p.c1, p.c2) == pytest.approx(
        _kernels.ssim_pair_numpy(v[0], v[1], p.window, p.c1, p.c2), abs=1e-9
    )


def test_backend_reports_a_name():
    assert _kernels.backend() in ("numba", "numpy")


def test_constant_and_singleton_videos():
    v = np.full((3, 1, 8, 8), 0.3, np.float32)
    assert np.allclose(similarity_matrix(v).s, 1.0)
    assert similarity_matrix(v[:1]).s.tolist() == [[1.0]]


def test_static_then_moving_block_structure():
    from dlfr.synth import generate_video, SyntheticSceneSpec

    v = generate_video(SyntheticSceneSpec())[:, :, ::2, ::2]
    s = similarity_matrix(v).s
    assert np.all(s[:8, :8] > 0.99)
    for i in range(8, 15):
        assert s[i, i + 1] < 0.9
        assert s[i, i + 1] == pytest.approx(scalar_ssim(v[i], v[i + 1]), abs=1e-6)
