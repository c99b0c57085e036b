"""Kernel backend selection: compiled extension when built, NumPy otherwise.

Set RULELENS_PURE=1 to force the pure-Python path (used by the benchmark
and the kernel-equivalence tests).
"""

from __future__ import annotations

import os

from ._kernels_py import count_candidates as _count_py, pack_bool, popcount

if os.environ.get("RULELENS_PURE"):
    _speedups = None
else:
    try:
        from . import _speedups
    except ImportError:
        _speedups = None

BACKEND = "compiled" if _speedups is not None else "pure"


def count_candidates(masks, label_mask, cands):
    if _speedups is not None:
        return _speedups.count_candidates(masks, label_mask, cands)
    return _count_py(masks, label_mask, cands)


__all__ = ["BACKEND", "count_candidates", "pack_bool", "popcount"]
