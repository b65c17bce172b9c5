"""Hot numeric kernels, each with a numba-jitted and a pure-numpy path.

The jitted path is used by default when numba imports cleanly. Set the
environment variable ``WAPGUARD_DISABLE_NUMBA=1`` (before import) to force
the numpy fallback; ``benchmarks/bench_kernels.py`` times both paths.

Both paths of every kernel are bit-identical on the same inputs; the test
suite asserts this, so either path may back the public API.
"""

from __future__ import annotations

import math
import os

import numpy as np

NUMBA_ENV_FLAG = "WAPGUARD_DISABLE_NUMBA"


def _numba_requested() -> bool:
    return os.environ.get(NUMBA_ENV_FLAG, "").strip() not in ("1", "true", "yes")


try:
    if _numba_requested():
        from numba import njit

        NUMBA_ENABLED = True
    else:
        NUMBA_ENABLED = False
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_ENABLED = False


# ---------------------------------------------------------------------------
# numpy reference implementations


def pairwise_iou_np(boxes_a: np.ndarray, boxes_b: np.ndarray) -> np.ndarray:
    """IoU matrix between two (N,4) / (M,4) corner-format box arrays."""
    boxes_a = np.asarray(boxes_a, dtype=np.float64).reshape(-1, 4)
    boxes_b = np.asarray(boxes_b, dtype=np.float64).reshape(-1, 4)
    if boxes_a.shape[0] == 0 or boxes_b.shape[0] == 0:
        return np.zeros((boxes_a.shape[0], boxes_b.shape[0]), dtype=np.float64)
    area_a = (boxes_a[:, 2] - boxes_a[:, 0]) * (boxes_a[:, 3] - boxes_a[:, 1])
    area_b = (boxes_b[:, 2] - boxes_b[:, 0]) * (boxes_b[:, 3] - boxes_b[:, 1])
    ix1 = np.maximum(boxes_a[:, None, 0], boxes_b[None, :, 0])
    iy1 = np.maximum(boxes_a[:, None, 1], boxes_b[None, :, 1])
    ix2 = np.minimum(boxes_a[:, None, 2], boxes_b[None, :, 2])
    iy2 = np.minimum(boxes_a[:, None, 3], boxes_b[None, :, 3])
    inter = np.maximum(0.0, ix2 - ix1) * np.maximum(0.0, iy2 - iy1)
    union = area_a[:, None] + area_b[None, :] - inter
    out = np.zeros_like(inter)
    np.divide(inter, union, out=out, where=union > 0.0)
    return out


def greedy_match_np(iou: np.ndarray, eligible: np.ndarray) -> np.ndarray:
    """One-to-one greedy matching by descending IoU over eligible pairs.

    Ties break toward the lower row index, then the lower column index
    (first maximum in row-major order). Returns a (K,2) int64 array of
    (row, col) pairs in acceptance order.
    """
    n, m = iou.shape
    if n == 0 or m == 0:
        return np.empty((0, 2), dtype=np.int64)
    work = np.where(eligible, iou, -1.0)
    pairs = []
    for _ in range(min(n, m)):
        flat = int(np.argmax(work))
        i, j = divmod(flat, m)
        if work[i, j] < 0.0:
            break
        pairs.append((i, j))
        work[i, :] = -1.0
        work[:, j] = -1.0
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def quantize_u8_np(values: np.ndarray, bits: int) -> np.ndarray:
    """Bit-depth reduction of uint8 values, round half away from zero."""
    levels = float((1 << bits) - 1)
    lut = np.empty(256, dtype=np.uint8)
    for v in range(256):
        q = math.floor(v / 255.0 * levels + 0.5)
        lut[v] = int(math.floor(q / levels * 255.0 + 0.5))
    return lut[values]


def clamp_round_u8_np(values: np.ndarray) -> np.ndarray:
    """Clamp float values to [0,255] and round half away from zero to uint8."""
    clipped = np.clip(np.asarray(values, dtype=np.float64), 0.0, 255.0)
    return np.floor(clipped + 0.5).astype(np.uint8)


def windowed_all_above_np(distances: np.ndarray, theta: float, window: int) -> np.ndarray:
    """Per-frame alarm flags: true where the last `window` values all exceed theta."""
    d = np.asarray(distances, dtype=np.float64)
    n = d.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.bool_)
    above = d > theta
    idx = np.arange(n)
    last_below = np.maximum.accumulate(np.where(~above, idx, -1))
    run_length = idx - last_below
    return run_length >= window


# ---------------------------------------------------------------------------
# numba-jitted implementations

if NUMBA_ENABLED:

    @njit(cache=True)
    def _pairwise_iou_nb(boxes_a, boxes_b):
        n = boxes_a.shape[0]
        m = boxes_b.shape[0]
        out = np.zeros((n, m), dtype=np.float64)
        for i in range(n):
            ax1, ay1, ax2, ay2 = boxes_a[i, 0], boxes_a[i, 1], boxes_a[i, 2], boxes_a[i, 3]
            area_a = (ax2 - ax1) * (ay2 - ay1)
            for j in range(m):
                bx1, by1, bx2, by2 = boxes_b[j, 0], boxes_b[j, 1], boxes_b[j, 2], boxes_b[j, 3]
                iw = min(ax2, bx2) - max(ax1, bx1)
                if iw <= 0.0:
                    continue
                ih = min(ay2, by2) - max(ay1, by1)
                if ih <= 0.0:
                    continue
                inter = iw * ih
                union = area_a + (bx2 - bx1) * (by2 - by1) - inter
                if union > 0.0:
                    out[i, j] = inter / union
        return out

    @njit(cache=True)
    def _greedy_match_nb(iou, eligible):
        n, m = iou.shape
        k_max = min(n, m)
        out = np.empty((k_max, 2), dtype=np.int64)
        used_i = np.zeros(n, dtype=np.bool_)
        used_j = np.zeros(m, dtype=np.bool_)
        k = 0
        while k < k_max:
            best = -1.0
            bi = -1
            bj = -1
            for i in range(n):
                if used_i[i]:
                    continue
                for j in range(m):
                    if used_j[j] or not eligible[i, j]:
                        continue
                    if iou[i, j] > best:
                        best = iou[i, j]
                        bi = i
                        bj = j
            if bi < 0:
                break
            out[k, 0] = bi
            out[k, 1] = bj
            used_i[bi] = True
            used_j[bj] = True
            k += 1
        return out[:k]

    @njit(cache=True)
    def _quantize_u8_flat_nb(flat, bits):
        levels = float((1 << bits) - 1)
        out = np.empty(flat.shape[0], dtype=np.uint8)
        for i in range(flat.shape[0]):
            q = math.floor(flat[i] / 255.0 * levels + 0.5)
            out[i] = np.uint8(math.floor(q / levels * 255.0 + 0.5))
        return out

    @njit(cache=True)
    def _clamp_round_u8_flat_nb(flat):
        out = np.empty(flat.shape[0], dtype=np.uint8)
        for i in range(flat.shape[0]):
            v = flat[i]
            if v < 0.0:
                v = 0.0
            elif v > 255.0:
                v = 255.0
            out[i] = np.uint8(math.floor(v + 0.5))
        return out

    @njit(cache=True)
    def _windowed_all_above_nb(distances, theta, window):
        n = distances.shape[0]
        out = np.zeros(n, dtype=np.bool_)
        run = 0
        for i in range(n):
            if distances[i] > theta:
                run += 1
            else:
                run = 0
            out[i] = run >= window
        return out

    def pairwise_iou_nb(boxes_a: np.ndarray, boxes_b: np.ndarray) -> np.ndarray:
        a = np.ascontiguousarray(boxes_a, dtype=np.float64).reshape(-1, 4)
        b = np.ascontiguousarray(boxes_b, dtype=np.float64).reshape(-1, 4)
        return _pairwise_iou_nb(a, b)

    def greedy_match_nb(iou: np.ndarray, eligible: np.ndarray) -> np.ndarray:
        return _greedy_match_nb(
            np.ascontiguousarray(iou, dtype=np.float64),
            np.ascontiguousarray(eligible, dtype=np.bool_),
        )

    def quantize_u8_nb(values: np.ndarray, bits: int) -> np.ndarray:
        flat = np.ascontiguousarray(values, dtype=np.uint8).reshape(-1)
        return _quantize_u8_flat_nb(flat, bits).reshape(values.shape)

    def clamp_round_u8_nb(values: np.ndarray) -> np.ndarray:
        arr = np.asarray(values, dtype=np.float64)
        flat = np.ascontiguousarray(arr).reshape(-1)
        return _clamp_round_u8_flat_nb(flat).reshape(arr.shape)

    def windowed_all_above_nb(distances: np.ndarray, theta: float, window: int) -> np.ndarray:
        return _windowed_all_above_nb(
            np.ascontiguousarray(distances, dtype=np.float64), float(theta), int(window)
        )

    pairwise_iou = pairwise_iou_nb
    greedy_match = greedy_match_nb
    quantize_u8 = quantize_u8_nb
    clamp_round_u8 = clamp_round_u8_nb
    windowed_all_above = windowed_all_above_nb
else:
    pairwise_iou = pairwise_iou_np
    greedy_match = greedy_match_np
    quantize_u8 = quantize_u8_np
    clamp_round_u8 = clamp_round_u8_np
    windowed_all_above = windowed_all_above_np


def warmup() -> None:
    """Trigger JIT compilation of every kernel on tiny inputs."""
    boxes = np.array([[0.0, 0.0, 2.0, 2.0], [1.0, 1.0, 3.0, 3.0]])
    mat = pairwise_iou(boxes, boxes)
    greedy_match(mat, mat > 0.1)
    quantize_u8(np.arange(16, dtype=np.uint8), 3)
    clamp_round_u8(np.linspace(-10.0, 300.0, 16))
    windowed_all_above(np.array([0.0, 1.0, 1.0]), 0.5, 2)
