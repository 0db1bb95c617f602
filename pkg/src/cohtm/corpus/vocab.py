"""Vocabulary construction and bag-of-words ingestion.

Corpora arrive preprocessed: UTF-8 text, one document per line, whitespace
tokens.  No tokenization or filtering beyond frequency cutoffs happens here.
"""

from collections import Counter

import numpy as np


class CorpusError(ValueError):
    pass


class Vocabulary:
    """Bijective token <-> dense id mapping, ids stable across save/load."""

    def __init__(self, words):
        self.words = list(words)
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise CorpusError("duplicate token in vocabulary")
        if len(self.words) < 2:
            raise CorpusError("vocabulary must contain at least 2 tokens")

    def __len__(self):
        return len(self.words)

    def __contains__(self, token):
        return token in self.index

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.words == other.words


class BowCorpus:
    """Sparse document-term counts plus the aligned token-id sequences.

    ``sequences`` preserves token order for sliding-window co-occurrence
    counting; ``docs`` holds (word_id, count) pairs per document.
    ``dropped_lines`` lists 1-based input line numbers that had no
    in-vocabulary tokens and were removed.
    """

    def __init__(self, sequences, vocab_size, dropped_lines=None):
        self.sequences = [np.asarray(s, dtype=np.int32) for s in sequences]
        self.vocab_size = int(vocab_size)
        self.dropped_lines = list(dropped_lines or [])
        self.docs = []
        total = 0
        for seq in self.sequences:
            if len(seq) == 0:
                raise CorpusError("BowCorpus documents must be non-empty")
            if seq.min() < 0 or seq.max() >= self.vocab_size:
                raise CorpusError("word id out of range")
            ids, counts = np.unique(seq, return_counts=True)
            self.docs.append(list(zip(ids.tolist(), counts.tolist())))
            total += len(seq)
        self.total_tokens = total

    @property
    def num_docs(self):
        return len(self.docs)

    def dense_rows(self, indices):
        """Dense float64 count matrix for the selected documents."""
        out = np.zeros((len(indices), self.vocab_size), dtype=np.float64)
        for r, d in enumerate(indices):
            for wid, cnt in self.docs[d]:
                out[r, wid] = cnt
        return out


def _read_token_lines(path):
    with open(path, encoding="utf-8") as fh:
        lines = [line.split() for line in fh]
    if not any(lines):
        raise CorpusError("empty corpus file: %s" % path)
    return lines


def load_corpus(path, min_df=1, max_vocab=2000):
    """Build a vocabulary and BoW corpus from a one-document-per-line file.

    Keeps the ``max_vocab`` tokens with the highest corpus frequency among
    those with document frequency >= ``min_df``; frequency ties break
    lexicographically.  Ids are assigned in (frequency desc, token asc) order.
    Documents left without in-vocabulary tokens are dropped and reported via
    ``BowCorpus.dropped_lines``.
    """
    if min_df < 1:
        raise CorpusError("min_df must be >= 1")
    lines = _read_token_lines(path)
    tf = Counter()
    df = Counter()
    for tokens in lines:
        tf.update(tokens)
        df.update(set(tokens))
    candidates = [w for w in tf if df[w] >= min_df]
    candidates.sort(key=lambda w: (-tf[w], w))
    vocab_words = candidates[:max_vocab]
    if len(vocab_words) < 2:
        raise CorpusError("vocabulary smaller than 2 after filtering")
    vocab = Vocabulary(vocab_words)
    bow = _sequences_from_lines(lines, vocab)
    return vocab, bow


def load_corpus_with_vocab(path, vocab):
    """BoW corpus for ``path`` under an existing vocabulary."""
    lines = _read_token_lines(path)
    return _sequences_from_lines(lines, vocab)


def _sequences_from_lines(lines, vocab):
    sequences = []
    dropped = []
    for lineno, tokens in enumerate(lines, 1):
        seq = [vocab.index[t] for t in tokens if t in vocab.index]
        if seq:
            sequences.append(np.asarray(seq, dtype=np.int32))
        else:
            dropped.append(lineno)
    if not sequences:
        raise CorpusError("no documents left after vocabulary filtering")
    return BowCorpus(sequences, len(vocab), dropped_lines=dropped)


def load_vocabulary(path):
    """Vocabulary from a one-token-per-line file; ids follow line order."""
    with open(path, encoding="utf-8") as fh:
        words = [line.strip() for line in fh if line.strip()]
    if not words:
        raise CorpusError("empty vocabulary file: %s" % path)
    seen = set()
    for w in words:
        if w in seen:
            raise CorpusError("duplicate token in vocabulary file: %r" % w)
        seen.add(w)
    return Vocabulary(words)


def save_vocabulary(path, vocab):
    with open(path, "w", encoding="utf-8") as fh:
        for w in vocab.words:
            fh.write(w + "\n")
