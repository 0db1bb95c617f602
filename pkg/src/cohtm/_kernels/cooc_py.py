"""Pure-Python sliding-window counting, used when the compiled kernel is absent.

Must produce results identical to ``_cooc.count_windows``.
"""

import numpy as np


def count_windows(sequences, window, vocab_size):
    """Boolean sliding-window counts over token-id sequences.

    Every contiguous span of ``window`` tokens is one window; a document
    shorter than the window is a single window.  Returns
    ``(window_count, word_windows, pairs)`` where ``pairs`` maps the packed
    key ``i * vocab_size + j`` (i < j) to the number of windows containing
    both words.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    window_count = 0
    word_windows = [0] * vocab_size
    pairs = {}
    for seq in sequences:
        toks = [int(t) for t in seq]
        n_win = max(len(toks) - window + 1, 1)
        window_count += n_win
        for s in range(n_win):
            span = sorted(set(toks[s:s + window]))
            for a_pos, a in enumerate(span):
                word_windows[a] += 1
                base = a * vocab_size
                for b in span[a_pos + 1:]:
                    key = base + b
                    pairs[key] = pairs.get(key, 0) + 1
    return window_count, np.asarray(word_windows, dtype=np.int64), pairs
