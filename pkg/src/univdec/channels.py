"""Channels W_n(y|x): memoryless (DMC) and finite-state.

A finite-state channel emits y_i from ``emissions[s_{i-1}][x_i]`` and then
moves to ``next_state[s_{i-1}][x_i][y_i]``, starting from a fixed public
initial state.  The state sequence is never shown to decoders.  A DMC is the
one-state special case.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ._util import FLOAT_SUM_TOL, lcm_all, log2_fraction, to_fraction
from .sequences import all_pairs, validate_sequence


class FiniteStateChannel:
    def __init__(self, next_state, emissions, initial_state=0, exact=True):
        self.next_state = np.asarray(next_state, dtype=np.int64)
        if self.next_state.ndim != 3:
            raise ValueError("next_state must be indexed [state][x][y]")
        S, X, Y = self.next_state.shape
        if self.next_state.min() < 0 or self.next_state.max() >= S:
            raise ValueError("next_state refers to a state that does not exist")
        if not 0 <= initial_state < S:
            raise ValueError("initial state out of range")
        self.num_states, self.input_size, self.output_size = S, X, Y
        self.initial_state = int(initial_state)
        self.exact = exact
        rows = [[list(emissions[s][x]) for x in range(X)] for s in range(S)]
        if any(len(r) != Y for per_s in rows for r in per_s):
            raise ValueError("every emission row must have one entry per output symbol")
        if exact:
            frac = [[[to_fraction(v) for v in r] for r in per_s] for per_s in rows]
            for s, per_s in enumerate(frac):
                for x, r in enumerate(per_s):
                    if any(v < 0 for v in r) or sum(r) != 1:
                        raise ValueError(f"emission row (state {s}, x {x}) is not a distribution")
            self._den1 = lcm_all(v.denominator for per_s in frac for r in per_s for v in r)
            nums = [[[int(v * self._den1) for v in r] for r in per_s] for per_s in frac]
            self.emissions = frac
            self._num = np.asarray(nums, dtype=np.int64)
            self._fprob = np.asarray([[[float(v) for v in r] for r in per_s] for per_s in frac])
        else:
            self._fprob = np.asarray(rows, dtype=float)
            sums = self._fprob.sum(axis=2)
            if (self._fprob < 0).any() or np.abs(sums - 1).max() > FLOAT_SUM_TOL:
                raise ValueError("emission rows must be distributions")
            self.emissions = self._fprob.tolist()
        with np.errstate(divide="ignore"):
            self._log2 = np.log2(self._fprob)
        self._cum = np.cumsum(self._fprob, axis=2)

    def _walk(self, xs, ys, table, combine, start):
        xs = np.atleast_2d(np.asarray(xs, dtype=np.int64))
        ys = np.atleast_2d(np.asarray(ys, dtype=np.int64))
        if xs.shape != ys.shape:
            raise ValueError("x and y batches must have the same shape")
        state = np.full(xs.shape[0], self.initial_state, dtype=np.int64)
        acc = start(xs.shape[0])
        for i in range(xs.shape[1]):
            acc = combine(acc, table[state, xs[:, i], ys[:, i]])
            state = self.next_state[state, xs[:, i], ys[:, i]]
        return acc

    def likelihood_numerators(self, xs, ys):
        """Integer numerators of W(y|x) over the common denominator ``den1**n`` (exact mode)."""
        if not self.exact:
            raise ValueError("exact likelihoods need an exact-mode channel")
        n = np.shape(xs)[-1]
        big = self._den1 ** n >= 2 ** 62
        table = self._num.astype(object) if big else self._num

        def start(size):
            return np.ones(size, dtype=object if big else np.int64)

        return self._walk(xs, ys, table, lambda a, b: a * b, start)

    def log2_likelihood_batch(self, xs, ys):
        return self._walk(xs, ys, self._log2, lambda a, b: a + b, lambda size: np.zeros(size))

    def likelihood(self, x, y):
        x = validate_sequence(x, self.input_size)
        y = validate_sequence(y, self.output_size, len(x))
        if self.exact:
            num = int(self.likelihood_numerators(x[None], y[None])[0])
            return Fraction(num, self._den1 ** len(x))
        return float(2.0 ** self.log2_likelihood_batch(x[None], y[None])[0])

    def transition_table(self, n, cap=None):
        """All W(y|x) as an (Nx, Ny) table: integer numerators plus denominator, or log2 floats."""
        xs, ys = all_pairs(self.input_size, self.output_size, n, cap)
        shape = (self.input_size ** n, self.output_size ** n)
        if self.exact:
            return self.likelihood_numerators(xs, ys).reshape(shape), self._den1 ** n
        return self.log2_likelihood_batch(xs, ys).reshape(shape)

    def sample(self, xs, rng):
        """Channel outputs for a batch of inputs (rows)."""
        xs = np.atleast_2d(np.asarray(xs, dtype=np.int64))
        T, n = xs.shape
        ys = np.empty_like(xs)
        state = np.full(T, self.initial_state, dtype=np.int64)
        u = rng.random((T, n))
        for i in range(n):
            cum = self._cum[state, xs[:, i]]
            ys[:, i] = np.minimum((u[:, i, None] >= cum).sum(axis=1), self.output_size - 1)
            state = self.next_state[state, xs[:, i], ys[:, i]]
        return ys


class DMC(FiniteStateChannel):
    """Discrete memoryless channel given by a row-stochastic matrix W[x][y]."""

    def __init__(self, matrix, exact=True):
        matrix = [list(r) for r in matrix]
        X, Y = len(matrix), len(matrix[0])
        super().__init__(np.zeros((1, X, Y), dtype=np.int64), [matrix], 0, exact=exact)
        self.matrix = self.emissions[0]

    def __repr__(self):
        return f"DMC({[[str(v) for v in r] for r in self.matrix]})"


def bsc(delta, exact=True):
    d = to_fraction(delta) if exact else float(delta)
    return DMC([[1 - d, d], [d, 1 - d]], exact=exact)


def identity_channel(size):
    return DMC([[int(i == j) for j in range(size)] for i in range(size)])


def channel_sample(channel, x, seed):
    """One channel output for input ``x``, reproducible from ``seed``."""
    x = validate_sequence(x, channel.input_size)
    rng = np.random.default_rng(seed)
    return channel.sample(x[None], rng)[0]


def gilbert_elliott(good, bad, exact=True):
    """Two-state BSC whose state becomes 'bad' after a flipped symbol and 'good' otherwise."""
    g = to_fraction(good) if exact else float(good)
    b = to_fraction(bad) if exact else float(bad)
    next_state = [[[0, 1], [1, 0]], [[0, 1], [1, 0]]]
    emissions = [[[1 - g, g], [g, 1 - g]], [[1 - b, b], [b, 1 - b]]]
    return FiniteStateChannel(next_state, emissions, 0, exact=exact)


def log2_likelihood(channel, x, y):
    lik = channel.likelihood(x, y)
    return log2_fraction(lik) if isinstance(lik, Fraction) else math.log2(lik) if lik > 0 else -math.inf
