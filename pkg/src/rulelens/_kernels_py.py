"""Pure-NumPy counting kernel: bit-packed row sets and popcounts.

Every item's matching rows are a packed uint64 bitmap; counting a candidate
LHS is an AND over its item bitmaps plus a popcount. This is the fallback
used when the compiled extension is unavailable.
"""

from __future__ import annotations

import numpy as np

_POP8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)


def pack_bool(mask: np.ndarray) -> np.ndarray:
    """Pack a boolean row vector into little-endian uint64 words."""
    bits = np.asarray(mask, dtype=bool)
    n_words = (bits.size + 63) // 64
    padded = np.zeros(n_words * 64, dtype=bool)
    padded[: bits.size] = bits
    return np.packbits(padded, bitorder="little").view(np.uint64)


def popcount(words: np.ndarray) -> int:
    return int(_POP8[words.view(np.uint8)].sum(dtype=np.int64))


def _popcount_rows(words2d: np.ndarray) -> np.ndarray:
    return _POP8[words2d.view(np.uint8)].sum(axis=1, dtype=np.int64)


def count_candidates(masks, label_mask, cands, chunk: int = 4096):
    """Count LHS and LHS-and-label rows for each candidate item combination.

    masks: (n_items, n_words) uint64; label_mask: (n_words,) uint64;
    cands: (n_cand, k) int32 item indices. Returns (lhs, joint) int64 arrays.
    """
    cands = np.ascontiguousarray(cands, dtype=np.int32)
    n_cand, k = cands.shape
    lhs = np.empty(n_cand, dtype=np.int64)
    joint = np.empty(n_cand, dtype=np.int64)
    for start in range(0, n_cand, chunk):
        idx = cands[start : start + chunk]
        acc = masks[idx[:, 0]]
        if k > 1:
            acc = acc.copy()
            for j in range(1, k):
                np.bitwise_and(acc, masks[idx[:, j]], out=acc)
        lhs[start : start + len(idx)] = _popcount_rows(acc)
        joint[start : start + len(idx)] = _popcount_rows(acc & label_mask)
    return lhs, joint
