"""Benchmark the compiled co-occurrence kernel against the pure-Python fallback.

Usage: python3 benchmarks/bench_cooc.py [--docs 2000] [--len 120] [--vocab 2000]
                                        [--window 10] [--repeat 3]
"""

import argparse
import time

import numpy as np

from cohtm._kernels import HAVE_COMPILED, cooc_py

try:
    from cohtm._kernels import _cooc
except ImportError:
    _cooc = None


def make_corpus(docs, length, vocab_size, seed=0):
    rng = np.random.default_rng(seed)
    # zipf-ish skew so the dedup path sees realistic repeated tokens
    ranks = np.arange(1, vocab_size + 1, dtype=np.float64)
    probs = (1.0 / ranks) / (1.0 / ranks).sum()
    return [rng.choice(vocab_size, size=length, p=probs).astype(np.int32)
            for _ in range(docs)]


def bench(kernel, seqs, window, vocab_size, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = kernel(seqs, window, vocab_size)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=2000)
    parser.add_argument("--len", type=int, default=120, dest="length")
    parser.add_argument("--vocab", type=int, default=2000)
    parser.add_argument("--window", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    seqs = make_corpus(args.docs, args.length, args.vocab)
    tokens = args.docs * args.length
    print("corpus: %d docs, %d tokens, V=%d, window=%d"
          % (args.docs, tokens, args.vocab, args.window))
    print("compiled kernel available: %s" % HAVE_COMPILED)

    t_py, out_py = bench(cooc_py.count_windows, seqs, args.window, args.vocab,
                         args.repeat)
    print("pure python : %8.3f s  (%.0f tokens/s)" % (t_py, tokens / t_py))

    if _cooc is None:
        print("compiled    : not built (pip install -e . rebuilds it)")
        return
    t_cy, out_cy = bench(_cooc.count_windows, seqs, args.window, args.vocab,
                         args.repeat)
    print("compiled    : %8.3f s  (%.0f tokens/s)" % (t_cy, tokens / t_cy))
    print("speedup     : %.1fx" % (t_py / t_cy))

    same = (out_py[0] == out_cy[0]
            and np.array_equal(out_py[1], out_cy[1])
            and out_py[2] == out_cy[2])
    print("outputs identical: %s" % same)
    if not same:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
