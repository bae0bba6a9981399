"""Pure numpy/scipy kernels; fallback when the compiled extension is absent.

Must stay result-identical to ``zolab._speedups`` (the test suite compares
both backends on random inputs).
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .grid import ball_offsets

# 6-connectivity: symmetric closure of steps (1,0), (0,1), (1,1).
_CROSS_STRUCTURE = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1]], dtype=bool)


def ball_words(pixels: np.ndarray, r: int) -> np.ndarray:
    """Per-center ball word: bit i is the pixel at row-major offset i (torus)."""
    n = pixels.shape[0]
    words = np.zeros((n, n), dtype=np.uint32)
    for idx, (dr, dc) in enumerate(ball_offsets(r)):
        plane = np.roll(pixels, (-dr % n, -dc % n), axis=(0, 1)).astype(np.uint32)
        words |= plane << np.uint32(idx)
    return words


def _member_mask(pixels: np.ndarray, r: int, table: np.ndarray) -> np.ndarray:
    words = ball_words(pixels, r).reshape(-1)
    bits = (table[words >> np.uint32(6)] >> (words & np.uint32(63)).astype(np.uint64)) & np.uint64(1)
    return bits != 0


def first_member_center(pixels: np.ndarray, r: int, table: np.ndarray) -> int:
    """Row-major index of the first center whose ball word is in ``table``, or -1."""
    mask = _member_mask(pixels, r, table)
    hits = np.flatnonzero(mask)
    return int(hits[0]) if hits.size else -1


def member_centers(pixels: np.ndarray, r: int, table: np.ndarray) -> np.ndarray:
    """Row-major indices of all centers whose ball word is in ``table``."""
    return np.flatnonzero(_member_mask(pixels, r, table)).astype(np.int32)


def crosses(pixels: np.ndarray, value: int, axis: int) -> bool:
    """6-connected path of pixels == value joining the two borders along ``axis``.

    axis 0: first row to last row; axis 1: first column to last column.
    Paths never wrap around the borders.
    """
    mask = pixels == value
    if axis == 0:
        first, last = mask[0, :], mask[-1, :]
    else:
        first, last = mask[:, 0], mask[:, -1]
    if not (first.any() and last.any()):
        return False
    labels, count = ndimage.label(mask, structure=_CROSS_STRUCTURE)
    if count == 0:
        return False
    start = labels[0, :] if axis == 0 else labels[:, 0]
    end = labels[-1, :] if axis == 0 else labels[:, -1]
    return bool(np.isin(start[start > 0], end[end > 0]).any())
