import numpy as np
import pytest

from rulelens import _kernels_py
from rulelens._kernels import BACKEND
from rulelens._kernels_py import pack_bool, popcount

speedups = pytest.importorskip("rulelens._speedups")


def test_backend_reports_compiled_when_built():
    assert BACKEND in ("compiled", "pure")


def test_pack_bool_round_trip():
    bits = np.array([True, False] * 70 + [True], dtype=bool)
    packed = pack_bool(bits)
    assert packed.dtype == np.uint64
    assert popcount(packed) == int(bits.sum())


def test_compiled_matches_pure_on_random_masks(rng):
    n_rows, n_items = 517, 12
    table = rng.random((n_items, n_rows)) < 0.4
    masks = np.vstack([pack_bool(row) for row in table])
    label = pack_bool(rng.random(n_rows) < 0.3)
    for k in (1, 2, 3, 4):
        cands = np.array(
            [sorted(rng.choice(n_items, size=k, replace=False)) for _ in range(60)],
            dtype=np.int32,
        )
        got = speedups.count_candidates(masks, label, cands)
        want = _kernels_py.count_candidates(masks, label, cands)
        np.testing.assert_array_equal(got[0], want[0])
        np.testing.assert_array_equal(got[1], want[1])


def test_counts_match_direct_row_iteration(rng):
    n_rows, n_items = 203, 6
    table = rng.random((n_items, n_rows)) < 0.5
    labels = rng.random(n_rows) < 0.4
    masks = np.vstack([pack_bool(row) for row in table])
    label_mask = pack_bool(labels)
    cands = np.array([[0, 2, 5], [1, 3, 4]], dtype=np.int32)
    lhs, joint = speedups.count_candidates(masks, label_mask, cands)
    for c, cand in enumerate(cands):
        both = table[cand[0]] & table[cand[1]] & table[cand[2]]
        assert lhs[c] == int(both.sum())
        assert joint[c] == int((both & labels).sum())
