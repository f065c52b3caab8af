"""Alphabets and rank encoding of sequences.

A sequence over an alphabet of size ``q`` is identified with its base-``q``
positional rank, first symbol most significant.  That rank is the canonical
enumeration order used everywhere else in the package.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ._util import check_cap


@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if int(self.size) < 1:
            raise ValueError("alphabet size must be at least 1")

    def count(self, n):
        return self.size ** n


def validate_sequence(seq, size, n=None):
    arr = np.asarray(seq, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("a sequence is a one-dimensional array of symbols")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"sequence has length {arr.shape[0]}, expected {n}")
    if arr.size and (arr.min() < 0 or arr.max() >= size):
        raise ValueError(f"symbol out of range for alphabet of size {size}")
    return arr


def rank(seq, size):
    r = 0
    for s in seq:
        r = r * size + int(s)
    return r


def unrank(r, size, n):
    out = [0] * n
    for i in range(n - 1, -1, -1):
        r, out[i] = divmod(r, size)
    return tuple(out)


def ranks(seqs, size):
    """Vectorised rank of the rows of a 2-D symbol array."""
    seqs = np.asarray(seqs, dtype=np.int64)
    n = seqs.shape[-1]
    weights = size ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return seqs @ weights


def all_sequences(size, n, cap=None):
    """Every sequence of length ``n`` as rows, in rank order."""
    check_cap(size ** n, cap)
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(size), repeat=n)), dtype=np.int64)


def all_pairs(x_size, y_size, n, cap=None):
    """Every (x, y) pair flattened x-major: row ``i*Ny + j`` holds (x_i, y_j)."""
    xs = all_sequences(x_size, n, cap)
    ys = all_sequences(y_size, n, cap)
    check_cap(len(xs) * len(ys), cap, what="sequence pairs")
    return np.repeat(xs, len(ys), axis=0), np.tile(ys, (len(xs), 1))
