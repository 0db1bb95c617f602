"""Topic quality metrics: NPMI coherence, word-embedding coherence, topic
uniqueness, and inverted rank-biased overlap."""

import json

import numpy as np

from cohtm.corpus.npmi import npmi_pair


class EvalError(ValueError):
    pass


def topic_npmi(topics, counts):
    """Mean pairwise NPMI over each topic's distinct word pairs, then over topics.

    Pair scores use the same degenerate-limit conventions as the training
    NPMI matrix, so the result matches averaging NpmiMatrix entries exactly.
    Returns (mean, per_topic list).
    """
    per_topic = []
    for ids in topics.ids:
        if len(ids) < 2:
            raise EvalError("topics need at least 2 words for NPMI")
        vals = []
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                i, j = int(ids[a]), int(ids[b])
                vals.append(np.float32(npmi_pair(
                    counts.word_windows[i], counts.word_windows[j],
                    counts.pair_count(i, j), counts.window_count)))
        per_topic.append(float(np.mean(vals)))
    return float(np.mean(per_topic)), per_topic


def topic_npmi_from_matrix(topics, matrix):
    """Same as ``topic_npmi`` but reading a precomputed NpmiMatrix."""
    per_topic = []
    for ids in topics.ids:
        if len(ids) < 2:
            raise EvalError("topics need at least 2 words for NPMI")
        if max(int(i) for i in ids) >= matrix.vocab_size:
            raise EvalError("topic word id outside the NPMI matrix")
        vals = [matrix.n[int(ids[a]), int(ids[b])]
                for a in range(len(ids)) for b in range(a + 1, len(ids))]
        per_topic.append(float(np.mean(vals)))
    return float(np.mean(per_topic)), per_topic


def _cosine(u, v):
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def topic_we(topics, vectors):
    """Mean pairwise cosine similarity of pretrained vectors per topic.

    Pairs with a missing vector are skipped and counted; topics with no
    scorable pair are excluded.  Returns (mean, skipped_pairs, skipped_topics).
    """
    words_lists = topics.as_word_lists()
    per_topic = []
    skipped_pairs = 0
    skipped_topics = 0
    for words in words_lists:
        vals = []
        for a in range(len(words)):
            for b in range(a + 1, len(words)):
                if words[a] in vectors and words[b] in vectors:
                    vals.append(_cosine(vectors[words[a]], vectors[words[b]]))
                else:
                    skipped_pairs += 1
        if vals:
            per_topic.append(float(np.mean(vals)))
        else:
            skipped_topics += 1
    if not per_topic:
        raise EvalError("no topic had any pair covered by the word vectors")
    return float(np.mean(per_topic)), skipped_pairs, skipped_topics


def topic_uniqueness(topics):
    """Mean reciprocal of how many topics claim each top word; 1 = fully distinct."""
    id_lists = [[int(i) for i in ids] for ids in topics.ids]
    counts = {}
    for ids in id_lists:
        for w in ids:
            counts[w] = counts.get(w, 0) + 1
    per_topic = [np.mean([1.0 / counts[w] for w in ids]) for ids in id_lists]
    return float(np.mean(per_topic))


def rbo(list_a, list_b, p=0.9):
    """Truncated, normalized rank-biased overlap of two equal-length rankings."""
    if not 0.0 < p < 1.0:
        raise EvalError("rbo weight p must be in (0, 1)")
    depth = min(len(list_a), len(list_b))
    if depth == 0:
        raise EvalError("rbo needs non-empty rankings")
    seen_a, seen_b = set(), set()
    overlap = 0
    num = 0.0
    norm = 0.0
    for d in range(1, depth + 1):
        a, b = list_a[d - 1], list_b[d - 1]
        if a == b:
            overlap += 1
        else:
            if a in seen_b:
                overlap += 1
            if b in seen_a:
                overlap += 1
            seen_a.add(a)
            seen_b.add(b)
        w = p ** (d - 1)
        num += w * overlap / d
        norm += w
    return num / norm


def inverted_rbo(topics, p=0.9):
    """1 minus the mean RBO over all unordered topic pairs; 0 for a single topic."""
    id_lists = [[int(i) for i in ids] for ids in topics.ids]
    k = len(id_lists)
    if k < 2:
        return 0.0
    scores = [rbo(id_lists[a], id_lists[b], p=p)
              for a in range(k) for b in range(a + 1, k)]
    return 1.0 - float(np.mean(scores))


class EvalReport:
    """All four metrics plus per-topic detail and the evaluation settings."""

    def __init__(self, npmi, we, tu, irbo, per_topic_npmi, top_words_lists,
                 k, top_words, rbo_p, we_skipped_pairs=0, we_skipped_topics=0,
                 we_note=None):
        self.npmi = npmi
        self.we = we
        self.tu = tu
        self.irbo = irbo
        self.per_topic_npmi = per_topic_npmi
        self.top_words_lists = top_words_lists
        self.k = k
        self.top_words = top_words
        self.rbo_p = rbo_p
        self.we_skipped_pairs = we_skipped_pairs
        self.we_skipped_topics = we_skipped_topics
        self.we_note = we_note

    def to_dict(self):
        def r4(x):
            return None if x is None else round(float(x), 4)

        return {
            "npmi": r4(self.npmi),
            "we": r4(self.we),
            "tu": r4(self.tu),
            "irbo": r4(self.irbo),
            "per_topic_npmi": [r4(x) for x in self.per_topic_npmi],
            "top_words": self.top_words_lists,
            "config": {"k": self.k, "top_words": self.top_words, "rbo_p": self.rbo_p},
            "we_skipped_pairs": self.we_skipped_pairs,
            "we_skipped_topics": self.we_skipped_topics,
            "we_note": self.we_note,
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)


def evaluate_all(topics, npmi_source, vectors=None, rbo_p=0.9):
    """Full metric suite for an extracted TopicSet.

    ``npmi_source`` is either CoocCounts or a precomputed NpmiMatrix (the two
    agree exactly).  Without word vectors, WE is reported as None with a note.
    """
    if hasattr(npmi_source, "pair_count"):
        npmi_mean, per_topic = topic_npmi(topics, npmi_source)
    else:
        npmi_mean, per_topic = topic_npmi_from_matrix(topics, npmi_source)
    we = skipped_pairs = skipped_topics = None
    note = None
    if vectors is not None:
        we, skipped_pairs, skipped_topics = topic_we(topics, vectors)
    else:
        skipped_pairs = skipped_topics = 0
        note = "word vectors not supplied; WE metric skipped"
    top_words = len(topics.ids[0]) if topics.ids else 0
    return EvalReport(
        npmi=npmi_mean,
        we=we,
        tu=topic_uniqueness(topics),
        irbo=inverted_rbo(topics, p=rbo_p),
        per_topic_npmi=per_topic,
        top_words_lists=topics.words,
        k=topics.k,
        top_words=top_words,
        rbo_p=rbo_p,
        we_skipped_pairs=skipped_pairs,
        we_skipped_topics=skipped_topics,
        we_note=note,
    )
