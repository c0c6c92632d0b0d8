"""Dense float32 tensors, shared arithmetic and the VGT binary file format.

Tensors are plain ``numpy.ndarray`` values with dtype float32 in C order.
Latent videos are ``[N_latent, C_lat, H_latent, W_latent]`` and pixel videos
are ``[N_frames, C_px, H, W]`` with values in [0, 1].
"""

from __future__ import annotations

import os
import struct
from typing import Sequence

import numpy as np

VGT_MAGIC = b"VGT1"

# reductions larger than this accumulate in float64
_WIDE_ACCUM = 4096


class ShapeError(ValueError):
    """Raised when tensor extents do not satisfy an operation's contract."""


class VGTFormatError(ValueError):
    pass


def as_tensor(x) -> np.ndarray:
    """Return ``x`` as a C-contiguous float32 array (copying only if needed)."""
    return np.ascontiguousarray(x, dtype=np.float32)


def check_latent(x: np.ndarray, name: str = "latent") -> np.ndarray:
    x = as_tensor(x)
    if x.ndim != 4:
        raise ShapeError(f"{name} must be rank 4 [N, C, H, W], got shape {x.shape}")
    if min(x.shape) < 1:
        raise ShapeError(f"{name} has an empty axis: {x.shape}")
    return x


def check_pixels(y: np.ndarray, name: str = "video") -> np.ndarray:
    y = check_latent(y, name)
    return y


def same_shape(a: np.ndarray, b: np.ndarray, what: str = "operands") -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{what} differ in shape: {a.shape} vs {b.shape}")


def elementwise_lerp(a, b, w: float) -> np.ndarray:
    """``(1 - w) * a + w * b`` in float32.

    The endpoints are returned as exact copies so that ``w=0`` and ``w=1``
    reproduce the inputs bit for bit.
    """
    a = as_tensor(a)
    b = as_tensor(b)
    same_shape(a, b, "lerp operands")
    w = float(w)
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"lerp weight must lie in [0, 1], got {w}")
    if w == 0.0:
        return a.copy()
    if w == 1.0:
        return b.copy()
    # symmetric form keeps lerp(a, b, w) == lerp(b, a, 1 - w) for dyadic w
    wa = np.float32(1.0 - w)
    wb = np.float32(w)
    return as_tensor(wa * a + wb * b)


def mean_over_first_axis(stack: Sequence[np.ndarray]) -> np.ndarray:
    """Elementwise arithmetic mean of equally shaped tensors."""
    if len(stack) == 0:
        raise ValueError("cannot average an empty list of tensors")
    arrays = [as_tensor(t) for t in stack]
    shape = arrays[0].shape
    for t in arrays[1:]:
        same_shape(arrays[0], t, "stacked tensors")
    if len(arrays) == 1:
        return arrays[0].copy()
    total = np.zeros(shape, dtype=np.float64)
    for t in arrays:
        total += t
    return as_tensor(total / len(arrays))


def wide_mean(x: np.ndarray) -> float:
    """Mean of all elements, accumulated in float64 for large inputs."""
    x = np.asarray(x)
    if x.size > _WIDE_ACCUM:
        return float(np.mean(x, dtype=np.float64))
    return float(np.mean(x))


# --------------------------------------------------------------------------
# VGT files
# --------------------------------------------------------------------------


def encode_vgt(x) -> bytes:
    x = as_tensor(x)
    header = VGT_MAGIC + struct.pack("<I", x.ndim)
    header += struct.pack(f"<{x.ndim}Q", *x.shape)
    return header + x.astype("<f4", copy=False).tobytes(order="C")


def decode_vgt(buf: bytes) -> np.ndarray:
    if len(buf) < 8 or buf[:4] != VGT_MAGIC:
        raise VGTFormatError("not a VGT1 stream (bad magic)")
    (rank,) = struct.unpack_from("<I", buf, 4)
    off = 8
    if len(buf) < off + 8 * rank:
        raise VGTFormatError(f"truncated header: rank {rank} needs {8 * rank} extent bytes")
    shape = struct.unpack_from(f"<{rank}Q", buf, off)
    off += 8 * rank
    count = int(np.prod(shape, dtype=np.int64)) if rank else 1
    need = off + 4 * count
    if len(buf) < need:
        raise VGTFormatError(f"truncated payload: expected {4 * count} bytes, got {len(buf) - off}")
    if len(buf) > need:
        raise VGTFormatError(f"{len(buf) - need} trailing bytes after payload")
    data = np.frombuffer(buf, dtype="<f4", count=count, offset=off)
    return data.astype(np.float32).reshape(shape)


def write_vgt(path: str | os.PathLike, x) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(encode_vgt(x))
    except OSError as exc:
        raise OSError(f"cannot write VGT file {os.fspath(path)!r}: {exc.strerror}") from exc


def read_vgt(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_vgt(fh.read())
