import numpy as np
import pytest

from cohtm._kernels import cooc_py

try:
    from cohtm._kernels import _cooc
except ImportError:
    _cooc = None

from cohtm.corpus import brute_force_cooccurrences, count_cooccurrences, merge_counts
from cohtm.corpus.cooccurrence import CoocCounts, _counts_from_kernel

KERNELS = [cooc_py.count_windows] + ([_cooc.count_windows] if _cooc else [])


def _random_corpus(rng, max_docs=20, max_len=30, vocab_size=8):
    n_docs = int(rng.integers(1, max_docs + 1))
    seqs = []
    for _ in range(n_docs):
        length = int(rng.integers(1, max_len + 1))
        seqs.append(rng.integers(0, vocab_size, size=length).astype(np.int32))
    return seqs


def _assert_counts_equal(a, b):
    assert a.window_count == b.window_count
    assert np.array_equal(a.word_windows, b.word_windows)
    assert (a.pair_windows != b.pair_windows).nnz == 0


@pytest.mark.parametrize("kernel", KERNELS)
def test_hand_example_two_docs(kernel):
    seqs = [np.array([0, 1], dtype=np.int32), np.array([0, 2], dtype=np.int32)]
    wc, ww, pairs = kernel(seqs, 10, 3)
    assert wc == 2
    assert ww.tolist() == [2, 1, 1]
    assert pairs == {0 * 3 + 1: 1, 0 * 3 + 2: 1}  # (b, c) never co-occur


@pytest.mark.parametrize("kernel", KERNELS)
def test_repeated_token_single_window(kernel):
    wc, ww, pairs = kernel([np.array([0, 0, 0], dtype=np.int32)], 10, 1)
    assert wc == 1
    assert ww.tolist() == [1]
    assert pairs == {}


@pytest.mark.parametrize("kernel", KERNELS)
def test_sliding_window_count(kernel):
    doc = np.arange(12, dtype=np.int32) % 5
    wc, _, _ = kernel([doc], 10, 5)
    assert wc == 3  # positions 0..2


def test_kernels_agree_exactly():
    if _cooc is None:
        pytest.skip("compiled kernel not built")
    rng = np.random.default_rng(0)
    for _ in range(50):
        seqs = _random_corpus(rng, vocab_size=12)
        window = int(rng.choice([1, 2, 3, 10]))
        out_py = cooc_py.count_windows(seqs, window, 12)
        out_cy = _cooc.count_windows(seqs, window, 12)
        assert out_py[0] == out_cy[0]
        assert np.array_equal(out_py[1], out_cy[1])
        assert out_py[2] == out_cy[2]


@pytest.mark.parametrize("window", [1, 2, 3, 10])
def test_streaming_matches_brute_force_oracle(window):
    rng = np.random.default_rng(100 + window)
    for _ in range(50):
        vocab_size = int(rng.integers(2, 10))
        seqs = _random_corpus(rng, vocab_size=vocab_size)
        got = count_cooccurrences(seqs, window=window, vocab_size=vocab_size)
        want = brute_force_cooccurrences(seqs, window, vocab_size)
        _assert_counts_equal(got, want)


def test_pair_windows_invariants_random():
    rng = np.random.default_rng(5)
    for _ in range(20):
        seqs = _random_corpus(rng, vocab_size=10)
        c = count_cooccurrences(seqs, window=3, vocab_size=10)
        coo = c.pair_windows.tocoo()
        for i, j, v in zip(coo.row, coo.col, coo.data):
            assert v <= min(c.word_windows[i], c.word_windows[j])
        assert np.all(c.word_windows <= c.window_count)


def test_sharded_merge_equals_serial():
    rng = np.random.default_rng(9)
    seqs = _random_corpus(rng, max_docs=30, vocab_size=15)
    serial = count_cooccurrences(seqs, window=5, vocab_size=15)
    shards = [count_cooccurrences(seqs[i::3], window=5, vocab_size=15) for i in range(3)]
    merged = merge_counts(shards)
    _assert_counts_equal(serial, merged)


def test_pair_count_lookup_is_symmetric():
    seqs = [np.array([0, 1, 2], dtype=np.int32)]
    c = count_cooccurrences(seqs, window=10, vocab_size=3)
    assert c.pair_count(0, 1) == c.pair_count(1, 0) == 1
    assert c.pair_count(2, 2) == 1


def test_window_must_be_positive():
    with pytest.raises(ValueError):
        count_cooccurrences([np.array([0, 1], dtype=np.int32)], window=0, vocab_size=2)
