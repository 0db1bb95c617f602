"""Pairwise NPMI matrix from window co-occurrence counts, with a binary cache format.

Conventions for the degenerate limits:
  - zero joint count with nonzero marginals -> -1
  - zero marginal (word never seen in a window) -> 0
  - P(i,j) = P(i) = P(j), including the diagonal -> 1
"""

import struct

import numpy as np

_MAGIC = b"NPMI"
_VERSION = 1


class NpmiMatrixError(ValueError):
    pass


class NpmiMatrix:
    """Dense symmetric V x V float32 matrix with entries in [-1, 1]."""

    def __init__(self, n):
        self.n = np.asarray(n, dtype=np.float32)
        if self.n.ndim != 2 or self.n.shape[0] != self.n.shape[1]:
            raise NpmiMatrixError("NPMI matrix must be square")

    @property
    def vocab_size(self):
        return self.n.shape[0]


def npmi_pair(cw_i, cw_j, c_ij, window_count):
    """NPMI of one word pair from boolean window counts (float64)."""
    if cw_i == 0 or cw_j == 0:
        return 0.0
    if c_ij == 0:
        return -1.0
    if c_ij == cw_i and c_ij == cw_j:
        return 1.0
    pi = cw_i / window_count
    pj = cw_j / window_count
    pij = c_ij / window_count
    return np.log(pij / (pi * pj)) / -np.log(pij)


def npmi_matrix(counts):
    """Dense NPMI matrix for every word pair in ``counts``."""
    if counts.window_count <= 0:
        raise NpmiMatrixError("window_count must be positive")
    v = counts.vocab_size
    total = float(counts.window_count)
    ww = counts.word_windows.astype(np.float64)
    seen = ww > 0

    n = np.zeros((v, v), dtype=np.float64)
    # default for two observed words that never share a window
    n[np.ix_(seen, seen)] = -1.0

    coo = counts.pair_windows.tocoo()
    if coo.nnz:
        i, j, c = coo.row, coo.col, coo.data.astype(np.float64)
        pi = ww[i] / total
        pj = ww[j] / total
        pij = c / total
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.log(pij / (pi * pj)) / -np.log(pij)
        equal = (c == counts.word_windows[i]) & (c == counts.word_windows[j])
        vals = np.where(equal, 1.0, vals)
        n[i, j] = vals
        n[j, i] = vals
    n[np.diag_indices(v)] = np.where(seen, 1.0, 0.0)
    n = np.clip(n, -1.0, 1.0)
    return NpmiMatrix(n.astype(np.float32))


def save_npmi(path, matrix):
    """Write the cache: magic, version, V, then row-major little-endian float32."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _VERSION, matrix.vocab_size))
        fh.write(np.ascontiguousarray(matrix.n, dtype="<f4").tobytes())


def load_npmi(path, expected_vocab_size=None):
    """Bit-exact round trip of ``save_npmi``; validates header and length."""
    with open(path, "rb") as fh:
        header = fh.read(len(_MAGIC) + 8)
        if len(header) < len(_MAGIC) + 8 or header[: len(_MAGIC)] != _MAGIC:
            raise NpmiMatrixError("not an NPMI cache file: %s" % path)
        version, v = struct.unpack("<II", header[len(_MAGIC):])
        if version != _VERSION:
            raise NpmiMatrixError("unsupported NPMI cache version %d" % version)
        if expected_vocab_size is not None and v != expected_vocab_size:
            raise NpmiMatrixError(
                "NPMI cache vocabulary size %d does not match expected %d"
                % (v, expected_vocab_size))
        payload = fh.read()
    expected_bytes = 4 * v * v
    if len(payload) != expected_bytes:
        raise NpmiMatrixError("truncated NPMI cache: %d of %d payload bytes"
                              % (len(payload), expected_bytes))
    n = np.frombuffer(payload, dtype="<f4").reshape(v, v)
    return NpmiMatrix(n.copy())
