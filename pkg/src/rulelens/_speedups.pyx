# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernel: AND + popcount over packed uint64 bitmaps."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    static inline long rl_popcount64(unsigned long long x) {
        return __builtin_popcountll(x);
    }
    #else
    static inline long rl_popcount64(unsigned long long x) {
        x = x - ((x >> 1) & 0x5555555555555555ULL);
        x = (x & 0x3333333333333333ULL) + ((x >> 2) & 0x3333333333333333ULL);
        x = (x + (x >> 4)) & 0x0f0f0f0f0f0f0f0fULL;
        return (long)((x * 0x0101010101010101ULL) >> 56);
    }
    #endif
    """
    long rl_popcount64(unsigned long long x) nogil


def count_candidates(cnp.uint64_t[:, ::1] masks not None,
                     cnp.uint64_t[::1] label_mask not None,
                     cands):
    """Mirror of rulelens._kernels_py.count_candidates (same contract)."""
    cdef cnp.int32_t[:, ::1] cv = np.ascontiguousarray(cands, dtype=np.int32)
    cdef Py_ssize_t n_cand = cv.shape[0]
    cdef Py_ssize_t k = cv.shape[1]
    cdef Py_ssize_t n_words = masks.shape[1]

    lhs = np.empty(n_cand, dtype=np.int64)
    joint = np.empty(n_cand, dtype=np.int64)
    cdef cnp.int64_t[::1] lhs_v = lhs
    cdef cnp.int64_t[::1] joint_v = joint

    cdef Py_ssize_t c, j, w
    cdef cnp.uint64_t acc
    cdef long lc, jc
    with nogil:
        for c in range(n_cand):
            lc = 0
            jc = 0
            for w in range(n_words):
                acc = masks[cv[c, 0], w]
                for j in range(1, k):
                    acc &= masks[cv[c, j], w]
                lc += rl_popcount64(acc)
                jc += rl_popcount64(acc & label_mask[w])
            lhs_v[c] = lc
            joint_v[c] = jc
    return lhs, joint
