# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot inner loops: ball-word extraction,
description-set membership scans, and 6-connected crossing flood fill.

Mirrors zolab._kernels_py exactly; keep the two in sync.
"""

import numpy as np


cdef inline int _wrap(int v, int n) nogil:
    if v < 0:
        return v + n
    if v >= n:
        return v - n
    return v


cdef inline unsigned int _word_at(const unsigned char[:, ::1] pixels, int n,
                                  int r, int row, int col) nogil:
    cdef unsigned int word = 0
    cdef int dr, dc, idx = 0
    for dr in range(-r, r + 1):
        for dc in range(-r, r + 1):
            if pixels[_wrap(row + dr, n), _wrap(col + dc, n)]:
                word |= 1u << idx
            idx += 1
    return word


def ball_words(const unsigned char[:, ::1] pixels, int r):
    """Per-center ball word: bit i is the pixel at row-major offset i (torus)."""
    cdef int n = pixels.shape[0]
    out = np.empty((n, n), dtype=np.uint32)
    cdef unsigned int[:, ::1] w = out
    cdef int row, col
    for row in range(n):
        for col in range(n):
            w[row, col] = _word_at(pixels, n, r, row, col)
    return out


cdef inline bint _in_table(const unsigned long long[::1] table, unsigned int word) nogil:
    return (table[word >> 6] >> (word & 63)) & 1


def first_member_center(const unsigned char[:, ::1] pixels, int r,
                        const unsigned long long[::1] table):
    """Row-major index of the first center whose ball word is in ``table``, or -1."""
    cdef int n = pixels.shape[0]
    cdef int row, col
    for row in range(n):
        for col in range(n):
            if _in_table(table, _word_at(pixels, n, r, row, col)):
                return row * n + col
    return -1


def member_centers(const unsigned char[:, ::1] pixels, int r,
                   const unsigned long long[::1] table):
    """Row-major indices of all centers whose ball word is in ``table``."""
    cdef int n = pixels.shape[0]
    out = np.empty(n * n, dtype=np.int32)
    cdef int[::1] hits = out
    cdef int row, col, count = 0
    for row in range(n):
        for col in range(n):
            if _in_table(table, _word_at(pixels, n, r, row, col)):
                hits[count] = row * n + col
                count += 1
    return out[:count].copy()


def crosses(const unsigned char[:, ::1] pixels, int value, int axis):
    """6-connected path of pixels == value joining the two borders along ``axis``.

    axis 0: first row to last row; axis 1: first column to last column.
    Paths never wrap around the borders.
    """
    cdef int n = pixels.shape[0]
    cdef int[6] drs = [1, -1, 0, 0, 1, -1]
    cdef int[6] dcs = [0, 0, 1, -1, 1, -1]
    visited_arr = np.zeros(n * n, dtype=np.uint8)
    stack_arr = np.empty(n * n, dtype=np.int32)
    cdef unsigned char[::1] visited = visited_arr
    cdef int[::1] stack = stack_arr
    cdef int sp = 0, i, row, col, nr, nc, k

    for i in range(n):
        row = 0 if axis == 0 else i
        col = i if axis == 0 else 0
        if pixels[row, col] == value and not visited[row * n + col]:
            visited[row * n + col] = 1
            stack[sp] = row * n + col
            sp += 1
    while sp > 0:
        sp -= 1
        row = stack[sp] // n
        col = stack[sp] % n
        if (row == n - 1 if axis == 0 else col == n - 1):
            return True
        for k in range(6):
            nr = row + drs[k]
            nc = col + dcs[k]
            if 0 <= nr < n and 0 <= nc < n:
                if pixels[nr, nc] == value and not visited[nr * n + nc]:
                    visited[nr * n + nc] = 1
                    stack[sp] = nr * n + nc
                    sp += 1
    return False
