"""Sliding-window co-occurrence counting over token-id sequences."""

import numpy as np
import scipy.sparse as sp

from cohtm import _kernels


class CoocCounts:
    """Boolean window counts: total windows, per-word windows, per-pair windows.

    ``pair_windows`` is an upper-triangular CSR matrix (i < j); use
    ``pair_count`` for symmetric lookups.
    """

    def __init__(self, window_count, word_windows, pair_windows, vocab_size):
        self.window_count = int(window_count)
        self.word_windows = np.asarray(word_windows, dtype=np.int64)
        self.pair_windows = pair_windows.tocsr()
        self.vocab_size = int(vocab_size)
        if self.word_windows.shape != (self.vocab_size,):
            raise ValueError("word_windows shape does not match vocab_size")

    def pair_count(self, i, j):
        if i == j:
            return int(self.word_windows[i])
        if i > j:
            i, j = j, i
        return int(self.pair_windows[i, j])


def _counts_from_kernel(window_count, word_windows, pairs, vocab_size):
    if pairs:
        keys = np.fromiter(pairs.keys(), dtype=np.int64, count=len(pairs))
        vals = np.fromiter(pairs.values(), dtype=np.int64, count=len(pairs))
        rows, cols = np.divmod(keys, vocab_size)
    else:
        rows = cols = vals = np.zeros(0, dtype=np.int64)
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(vocab_size, vocab_size))
    return CoocCounts(window_count, word_windows, mat, vocab_size)


def count_cooccurrences(corpus, window=10, vocab_size=None):
    """Count boolean sliding-window co-occurrences.

    ``corpus`` is either a ``BowCorpus`` or a list of int token-id arrays (in
    which case ``vocab_size`` is required).  Every contiguous span of
    ``window`` tokens is one window; documents shorter than the window form a
    single window.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if hasattr(corpus, "sequences"):
        sequences = corpus.sequences
        vocab_size = corpus.vocab_size
    else:
        sequences = [np.asarray(s, dtype=np.int32) for s in corpus]
        if vocab_size is None:
            raise ValueError("vocab_size required for raw sequences")
    wc, ww, pairs = _kernels.count_windows(sequences, int(window), int(vocab_size))
    return _counts_from_kernel(wc, ww, pairs, vocab_size)


def merge_counts(parts):
    """Merge shard-wise counts; identical to counting the shards serially."""
    parts = list(parts)
    if not parts:
        raise ValueError("merge_counts needs at least one shard")
    vocab_size = parts[0].vocab_size
    wc = sum(p.window_count for p in parts)
    ww = np.sum([p.word_windows for p in parts], axis=0)
    mat = parts[0].pair_windows.copy()
    for p in parts[1:]:
        if p.vocab_size != vocab_size:
            raise ValueError("shard vocab sizes differ")
        mat = mat + p.pair_windows
    return CoocCounts(wc, ww, mat, vocab_size)


def brute_force_cooccurrences(sequences, window, vocab_size):
    """Independent oracle: materialize every window as a set, count memberships."""
    windows = []
    for seq in sequences:
        toks = [int(t) for t in seq]
        n_win = max(len(toks) - window + 1, 1)
        for s in range(n_win):
            windows.append(frozenset(toks[s:s + window]))
    word_windows = np.zeros(vocab_size, dtype=np.int64)
    for i in range(vocab_size):
        word_windows[i] = sum(1 for w in windows if i in w)
    rows, cols, vals = [], [], []
    for i in range(vocab_size):
        for j in range(i + 1, vocab_size):
            c = sum(1 for w in windows if i in w and j in w)
            if c:
                rows.append(i)
                cols.append(j)
                vals.append(c)
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(vocab_size, vocab_size), dtype=np.int64)
    return CoocCounts(len(windows), word_windows, mat, vocab_size)
