"""Loaders for pretrained word vectors and per-document embedding files."""

import numpy as np


class EmbeddingError(ValueError):
    pass


class WordVectors:
    """token -> float vector, all sharing one dimension."""

    def __init__(self, mapping):
        dims = {len(v) for v in mapping.values()}
        if len(dims) != 1:
            raise EmbeddingError("word vectors have inconsistent dimensions")
        self.dim = dims.pop()
        self.map = {t: np.asarray(v, dtype=np.float64) for t, v in mapping.items()}

    def __contains__(self, token):
        return token in self.map

    def __getitem__(self, token):
        return self.map[token]


class DocEmbeddings:
    """D x dim float matrix aligned to BowCorpus document order."""

    def __init__(self, rows):
        self.rows = np.asarray(rows, dtype=np.float64)
        if self.rows.ndim != 2:
            raise EmbeddingError("document embeddings must be a 2-d matrix")
        self.dim = self.rows.shape[1]

    @property
    def num_docs(self):
        return self.rows.shape[0]


def load_word_vectors(path):
    """Parse "token v1 v2 ... vd" lines; all rows must share one dimension."""
    mapping = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            token, vals = parts[0], parts[1:]
            if dim is None:
                dim = len(vals)
                if dim == 0:
                    raise EmbeddingError("line %d: no vector components" % lineno)
            elif len(vals) != dim:
                raise EmbeddingError(
                    "line %d: expected %d components, got %d" % (lineno, dim, len(vals)))
            if token in mapping:
                raise EmbeddingError("line %d: duplicate token %r" % (lineno, token))
            mapping[token] = [float(v) for v in vals]
    if not mapping:
        raise EmbeddingError("empty word-vector file: %s" % path)
    return WordVectors(mapping)


def load_doc_embeddings(path, expected_docs=None):
    """Parse "v1 v2 ... vd" lines aligned to corpus order."""
    rows = []
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if dim is None:
                dim = len(parts)
            elif len(parts) != dim:
                raise EmbeddingError(
                    "line %d: expected %d components, got %d" % (lineno, dim, len(parts)))
            rows.append([float(v) for v in parts])
    if not rows:
        raise EmbeddingError("empty document-embedding file: %s" % path)
    if expected_docs is not None and len(rows) != expected_docs:
        raise EmbeddingError(
            "document embedding rows (%d) do not match corpus size (%d)"
            % (len(rows), expected_docs))
    return DocEmbeddings(rows)
