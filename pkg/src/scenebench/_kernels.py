"""Hot numeric kernels: pairwise IoU and relation-offset geometry.

Each kernel has a numba @njit implementation and a pure-numpy fallback.
The fallback is selected when numba is unavailable or when the environment
variable SCENEBENCH_NO_NUMBA is set to a non-empty value. Both paths are
benchmarked against each other in benchmarks/bench_kernels.py and checked
for equality in tests.

Boxes are float64 arrays of shape (n, 4) holding (cx, cy, w, h).
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = bool(os.environ.get("SCENEBENCH_NO_NUMBA"))

# Relation-kind codes used in the (n, n) int8 offset matrices.
HORIZ_NONE, HORIZ_RIGHT, HORIZ_LEFT = 0, 1, -1
VERT_NONE, VERT_BELOW, VERT_ABOVE = 0, 1, -1


def _iou_matrix_np(boxes: np.ndarray) -> np.ndarray:
    cx, cy, w, h = boxes[:, 0], boxes[:, 1], boxes[:, 2], boxes[:, 3]
    x0, x1 = cx - w / 2, cx + w / 2
    y0, y1 = cy - h / 2, cy + h / 2
    ix = np.maximum(
        0.0, np.minimum(x1[:, None], x1[None, :]) - np.maximum(x0[:, None], x0[None, :])
    )
    iy = np.maximum(
        0.0, np.minimum(y1[:, None], y1[None, :]) - np.maximum(y0[:, None], y0[None, :])
    )
    inter = ix * iy
    area = w * h
    union = area[:, None] + area[None, :] - inter
    return inter / union


def _offset_signs_np(boxes: np.ndarray, c: float):
    """Pairwise relation signs: entry (i, j) describes box j relative to box i."""
    cx, cy, w, h = boxes[:, 0], boxes[:, 1], boxes[:, 2], boxes[:, 3]
    dx = cx[None, :] - cx[:, None]
    dy = cy[None, :] - cy[:, None]
    wsum = c * (w[:, None] + w[None, :])
    hsum = c * (h[:, None] + h[None, :])
    horiz = np.where(dx > wsum, HORIZ_RIGHT, np.where(dx < -wsum, HORIZ_LEFT, HORIZ_NONE))
    vert = np.where(dy > hsum, VERT_BELOW, np.where(dy < -hsum, VERT_ABOVE, VERT_NONE))
    return horiz.astype(np.int8), vert.astype(np.int8)


def _iou_matrix_loop(boxes):  # pragma: no cover - jit-compiled
    n = boxes.shape[0]
    out = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        xi0 = boxes[i, 0] - boxes[i, 2] / 2
        xi1 = boxes[i, 0] + boxes[i, 2] / 2
        yi0 = boxes[i, 1] - boxes[i, 3] / 2
        yi1 = boxes[i, 1] + boxes[i, 3] / 2
        ai = boxes[i, 2] * boxes[i, 3]
        for j in range(n):
            xj0 = boxes[j, 0] - boxes[j, 2] / 2
            xj1 = boxes[j, 0] + boxes[j, 2] / 2
            yj0 = boxes[j, 1] - boxes[j, 3] / 2
            yj1 = boxes[j, 1] + boxes[j, 3] / 2
            ix = min(xi1, xj1) - max(xi0, xj0)
            iy = min(yi1, yj1) - max(yi0, yj0)
            inter = max(0.0, ix) * max(0.0, iy)
            out[i, j] = inter / (ai + boxes[j, 2] * boxes[j, 3] - inter)
    return out


def _offset_signs_loop(boxes, c):  # pragma: no cover - jit-compiled
    n = boxes.shape[0]
    horiz = np.zeros((n, n), dtype=np.int8)
    vert = np.zeros((n, n), dtype=np.int8)
    for i in range(n):
        for j in range(n):
            dx = boxes[j, 0] - boxes[i, 0]
            dy = boxes[j, 1] - boxes[i, 1]
            ws = c * (boxes[i, 2] + boxes[j, 2])
            hs = c * (boxes[i, 3] + boxes[j, 3])
            if dx > ws:
                horiz[i, j] = HORIZ_RIGHT
            elif dx < -ws:
                horiz[i, j] = HORIZ_LEFT
            if dy > hs:
                vert[i, j] = VERT_BELOW
            elif dy < -hs:
                vert[i, j] = VERT_ABOVE
    return horiz, vert


if _DISABLE:
    iou_matrix = _iou_matrix_np
    offset_signs = _offset_signs_np
    BACKEND = "numpy"
else:
    try:
        from numba import njit

        iou_matrix = njit(cache=True)(_iou_matrix_loop)
        offset_signs = njit(cache=True)(_offset_signs_loop)
        BACKEND = "numba"
    except ImportError:  # pragma: no cover
        iou_matrix = _iou_matrix_np
        offset_signs = _offset_signs_np
        BACKEND = "numpy"
