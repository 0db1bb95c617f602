# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled sliding-window co-occurrence kernel.

Counts are accumulated per document in a dense doc-local pair matrix, then
flushed into a global dict keyed by ``i * vocab_size + j`` (i < j).  Results
are identical to the pure-Python fallback in ``cooc_py``.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def count_windows(sequences, int window, int vocab_size):
    if window < 1:
        raise ValueError("window must be >= 1")

    cdef cnp.int64_t window_count = 0
    word_windows_arr = np.zeros(vocab_size, dtype=np.int64)
    cdef cnp.int64_t[::1] word_windows = word_windows_arr
    g2l_arr = np.full(vocab_size, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] g2l = g2l_arr
    pairs = {}

    cdef cnp.int32_t[::1] doc, loc, uniq, stamp, buf
    cdef cnp.int64_t[::1] wins_local, pair_local
    cdef int L, U, n_win, s, e, t, a, b, m, li, lj, gi, gj, g, span
    cdef cnp.int64_t c, key

    for seq in sequences:
        doc = np.ascontiguousarray(seq, dtype=np.int32)
        L = doc.shape[0]
        if L == 0:
            continue
        loc_arr = np.empty(L, dtype=np.int32)
        loc = loc_arr
        uniq_arr = np.empty(L, dtype=np.int32)
        uniq = uniq_arr
        U = 0
        for t in range(L):
            g = doc[t]
            if g2l[g] < 0:
                g2l[g] = U
                uniq[U] = g
                U += 1
            loc[t] = g2l[g]

        n_win = L - window + 1
        if n_win < 1:
            n_win = 1
        span = window if window < L else L
        wins_local_arr = np.zeros(U, dtype=np.int64)
        wins_local = wins_local_arr
        pair_local_arr = np.zeros(U * U, dtype=np.int64)
        pair_local = pair_local_arr
        stamp_arr = np.full(U, -1, dtype=np.int32)
        stamp = stamp_arr
        buf_arr = np.empty(span, dtype=np.int32)
        buf = buf_arr

        for s in range(n_win):
            e = s + window
            if e > L:
                e = L
            m = 0
            for t in range(s, e):
                li = loc[t]
                if stamp[li] != s:
                    stamp[li] = s
                    buf[m] = li
                    m += 1
            for a in range(m):
                wins_local[buf[a]] += 1
            for a in range(m):
                li = buf[a]
                for b in range(a + 1, m):
                    lj = buf[b]
                    if li < lj:
                        pair_local[li * U + lj] += 1
                    else:
                        pair_local[lj * U + li] += 1
        window_count += n_win

        for a in range(U):
            word_windows[uniq[a]] += wins_local[a]
            g2l[uniq[a]] = -1
        for a in range(U):
            for b in range(a + 1, U):
                c = pair_local[a * U + b]
                if c > 0:
                    gi = uniq[a]
                    gj = uniq[b]
                    if gi > gj:
                        gi, gj = gj, gi
                    key = <cnp.int64_t> gi * vocab_size + gj
                    if key in pairs:
                        pairs[key] += c
                    else:
                        pairs[key] = c

    return int(window_count), word_windows_arr, pairs
