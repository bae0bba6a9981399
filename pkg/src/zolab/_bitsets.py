"""Packed bitsets over ball-coloring codes.

A radius-r ball has ``cells = (2r+1)**2`` pixels, so there are ``2**cells``
colorings, addressed by integer codes (bit i of the code is the color of
row-major ball cell i). Sets of colorings are stored as packed uint64
tables: bit ``code & 63`` of word ``code >> 6`` marks membership. At the
r = 2 cap a table is 2**25 bits = 4 MiB, which is why these sets are never
materialized as Python collections.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

_CHUNK_WORDS = 1 << 16  # 2**22 codes per scan chunk

# Constant per-word patterns of "bit i of the in-word offset" for i < 6.
_LOW_BIT_WORDS = [
    np.uint64(0xAAAAAAAAAAAAAAAA),
    np.uint64(0xCCCCCCCCCCCCCCCC),
    np.uint64(0xF0F0F0F0F0F0F0F0),
    np.uint64(0xFF00FF00FF00FF00),
    np.uint64(0xFFFF0000FFFF0000),
    np.uint64(0xFFFFFFFF00000000),
]


def word_count(cells: int) -> int:
    return max(1, (1 << cells) >> 6)


def valid_mask(cells: int) -> np.uint64:
    """Mask of the meaningful bits in the (single) word when 2**cells < 64."""
    if cells >= 6:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << (1 << cells)) - 1)


def constant_table(cells: int, value: bool) -> np.ndarray:
    table = np.full(word_count(cells), 0xFFFFFFFFFFFFFFFF if value else 0, dtype=np.uint64)
    if value:
        table[-1] = valid_mask(cells)
    return table


def mask_valid(table: np.ndarray, cells: int) -> np.ndarray:
    """Clear padding bits (needed after bitwise NOT on small tables)."""
    if cells < 6:
        table = table.copy()
        table[-1] &= valid_mask(cells)
    return table


def atom_table(cells: int, cell_index: int) -> np.ndarray:
    """Table of all codes whose bit ``cell_index`` is set."""
    nwords = word_count(cells)
    if cell_index < 6:
        table = np.full(nwords, _LOW_BIT_WORDS[cell_index], dtype=np.uint64)
    else:
        ws = np.arange(nwords, dtype=np.uint64)
        on = ((ws >> np.uint64(cell_index - 6)) & np.uint64(1)).astype(bool)
        table = np.where(on, np.uint64(0xFFFFFFFFFFFFFFFF), np.uint64(0))
    return mask_valid(table, cells)


def count(table: np.ndarray) -> int:
    return int(np.bitwise_count(table).sum())


def test(table: np.ndarray, code: int) -> bool:
    return bool((int(table[code >> 6]) >> (code & 63)) & 1)


def from_codes(cells: int, codes) -> np.ndarray:
    table = np.zeros(word_count(cells), dtype=np.uint64)
    for code in codes:
        if not 0 <= code < 1 << cells:
            raise ValueError(f"code {code} out of range for {cells} cells")
        table[code >> 6] |= np.uint64(1 << (code & 63))
    return table


def iter_code_chunks(table: np.ndarray) -> Iterator[np.ndarray]:
    """Yield member codes in ascending order, as int64 arrays."""
    for start in range(0, len(table), _CHUNK_WORDS):
        words = table[start : start + _CHUNK_WORDS]
        bits = np.unpackbits(words.view(np.uint8), bitorder="little")
        local = np.flatnonzero(bits)
        if local.size:
            yield local.astype(np.int64) + (start << 6)


def black_histogram(table: np.ndarray, cells: int) -> np.ndarray:
    """Member count per popcount (number of black cells), length cells+1."""
    hist = np.zeros(cells + 1, dtype=np.int64)
    for codes in iter_code_chunks(table):
        pc = np.bitwise_count(codes.astype(np.uint64)).astype(np.int64)
        hist += np.bincount(pc, minlength=cells + 1)
    return hist


def reduce_and_or(table: np.ndarray, cells: int) -> tuple[int, int]:
    """(AND, OR) over all member codes; identity values for the empty set."""
    and_acc = (1 << cells) - 1
    or_acc = 0
    for codes in iter_code_chunks(table):
        and_acc &= int(np.bitwise_and.reduce(codes))
        or_acc |= int(np.bitwise_or.reduce(codes))
    return and_acc, or_acc


def first_code_with_popcount(table: np.ndarray, k: int) -> int | None:
    """Smallest member code with exactly k set bits, or None."""
    for codes in iter_code_chunks(table):
        pc = np.bitwise_count(codes.astype(np.uint64))
        hits = codes[pc == k]
        if hits.size:
            return int(hits[0])
    return None
