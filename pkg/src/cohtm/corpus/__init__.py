"""Corpus ingestion: vocabulary, bag-of-words, window co-occurrence, NPMI matrix."""

from cohtm.corpus.cooccurrence import (
    CoocCounts,
    brute_force_cooccurrences,
    count_cooccurrences,
    merge_counts,
)
from cohtm.corpus.embeddings import (
    DocEmbeddings,
    WordVectors,
    load_doc_embeddings,
    load_word_vectors,
)
from cohtm.corpus.npmi import NpmiMatrix, load_npmi, npmi_matrix, npmi_pair, save_npmi
from cohtm.corpus.vocab import (
    BowCorpus,
    Vocabulary,
    load_corpus,
    load_corpus_with_vocab,
    load_vocabulary,
    save_vocabulary,
)

__all__ = [
    "BowCorpus",
    "CoocCounts",
    "DocEmbeddings",
    "NpmiMatrix",
    "Vocabulary",
    "WordVectors",
    "brute_force_cooccurrences",
    "count_cooccurrences",
    "load_corpus",
    "load_corpus_with_vocab",
    "load_doc_embeddings",
    "load_npmi",
    "load_vocabulary",
    "load_word_vectors",
    "merge_counts",
    "npmi_matrix",
    "npmi_pair",
    "save_npmi",
    "save_vocabulary",
]
