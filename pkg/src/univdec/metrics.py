"""Decoding metrics m(x, y) and finite metric families.

Every metric exposes ``keys(xs, ys)``: a batch of values that are exactly
comparable and order-equivalent to the metric for a fixed y.  Pairwise
errors only depend on that order, so the engine works on keys.  For most
metrics the keys are the metric values themselves; the channel-likelihood
metric uses integer likelihood numerators so that ties stay exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._util import check_cap, is_exact_number
from .sequences import all_pairs, ranks, validate_sequence

# Placeholder occupying window slots before the first symbol of a Markov metric.
BOUNDARY = None


def value_array(values):
    """Pack metric values: int64 for integers, object for exact rationals, float otherwise."""
    flat = list(np.asarray(values, dtype=object).ravel())
    shape = np.shape(values)
    if all(isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in flat):
        if all(abs(int(v)) < 2 ** 62 for v in flat):
            return np.asarray(values, dtype=np.int64)
    if all(is_exact_number(v) for v in flat):
        arr = np.empty(len(flat), dtype=object)
        arr[:] = [Fraction(v) if isinstance(v, Fraction) else int(v) for v in flat]
        return arr.reshape(shape)
    return np.asarray(values, dtype=float)


class Metric:
    x_size = None
    y_size = None
    label = None

    def keys(self, xs, ys):
        raise NotImplementedError

    def evaluate(self, xs, ys):
        return self.keys(xs, ys)

    def table(self, n, x_size=None, y_size=None, cap=None):
        """Keys for every (x, y) pair as an (|X|^n, |Y|^n) array in rank order."""
        x_size = x_size or self.x_size
        y_size = y_size or self.y_size
        if x_size is None or y_size is None:
            raise ValueError("alphabet sizes are needed to tabulate this metric")
        xs, ys = all_pairs(x_size, y_size, n, cap)
        return np.asarray(self.keys(xs, ys)).reshape(x_size ** n, y_size ** n)

    def column(self, xs, y):
        """Keys of every row of ``xs`` against a single output ``y``."""
        xs = np.asarray(xs, dtype=np.int64)
        return self.keys(xs, np.broadcast_to(np.asarray(y, dtype=np.int64), xs.shape))


class ConstantMetric(Metric):
    def __init__(self, value=0, x_size=None, y_size=None):
        self.value = value
        self.x_size, self.y_size = x_size, y_size

    def __repr__(self):
        return f"ConstantMetric({self.value!r})"

    def keys(self, xs, ys):
        return value_array([self.value] * np.shape(xs)[0])


class TableMetric(Metric):
    """Explicit values, ``values[rank(x)][rank(y)]``."""

    def __init__(self, values, x_size, y_size, label=None):
        self.values = value_array(values)
        if self.values.ndim != 2:
            raise ValueError("table metric values must be a 2-D array indexed [x][y]")
        self.x_size, self.y_size = int(x_size), int(y_size)
        nx, ny = self.values.shape
        self.n = round(math.log(nx, x_size)) if x_size > 1 else None
        if self.n is None:
            self.n = round(math.log(ny, y_size)) if y_size > 1 else 0
        if x_size ** self.n != nx or y_size ** self.n != ny:
            raise ValueError("table shape does not match |X|^n x |Y|^n")
        self.label = label

    def __repr__(self):
        return f"TableMetric(n={self.n}, label={self.label!r})"

    def keys(self, xs, ys):
        xs = np.atleast_2d(np.asarray(xs, dtype=np.int64))
        ys = np.atleast_2d(np.asarray(ys, dtype=np.int64))
        if xs.shape[-1] != self.n or ys.shape[-1] != self.n:
            raise ValueError(f"table metric is defined for blocklength {self.n}")
        return self.values[ranks(xs, self.x_size), ranks(ys, self.y_size)]


class ChannelLikelihood(Metric):
    """m(x, y) = log2 W(y|x) for a stored channel.

    Keys are the integer likelihood numerators (exact channels) or log2
    likelihoods (float channels); both induce the same order as the metric.
    """

    def __init__(self, channel, label=None):
        self.channel = channel
        self.x_size, self.y_size = channel.input_size, channel.output_size
        self.label = label

    def __repr__(self):
        return f"ChannelLikelihood({self.channel!r})"

    def keys(self, xs, ys):
        if self.channel.exact:
            return self.channel.likelihood_numerators(xs, ys)
        return self.channel.log2_likelihood_batch(xs, ys)

    def evaluate(self, xs, ys):
        return self.channel.log2_likelihood_batch(xs, ys)


class FiniteStateMetric(Metric):
    """Additive metric computed by a state machine.

    ``s_i = next_state[s_{i-1}, x_i, y_i]`` and
    ``m(x, y) = sum_i output[s_i, x_i, y_i]``, starting from ``initial_state``.
    """

    def __init__(self, next_state, output, initial_state=0, label=None):
        self.next_state = np.asarray(next_state, dtype=np.int64)
        if self.next_state.ndim != 3:
            raise ValueError("next_state must be indexed [state][x][y]")
        S, X, Y = self.next_state.shape
        self.output = value_array(output)
        if self.output.shape != (S, X, Y):
            raise ValueError("output table must have the same shape as next_state")
        if self.next_state.min() < 0 or self.next_state.max() >= S:
            raise ValueError("next_state refers to a state that does not exist")
        if not 0 <= initial_state < S:
            raise ValueError("initial state out of range")
        self.initial_state = int(initial_state)
        self.num_states, self.x_size, self.y_size = S, X, Y
        self.label = label

    def __repr__(self):
        return f"FiniteStateMetric(states={self.num_states}, label={self.label!r})"

    def keys(self, xs, ys):
        xs = np.atleast_2d(np.asarray(xs, dtype=np.int64))
        ys = np.atleast_2d(np.asarray(ys, dtype=np.int64))
        if xs.shape != ys.shape:
            raise ValueError("x and y batches must have the same shape")
        state = np.full(xs.shape[0], self.initial_state, dtype=np.int64)
        if self.output.dtype == object:
            acc = np.zeros(xs.shape[0], dtype=object)
        else:
            acc = np.zeros(xs.shape[0], dtype=self.output.dtype)
        for i in range(xs.shape[1]):
            state = self.next_state[state, xs[:, i], ys[:, i]]
            acc = acc + self.output[state, xs[:, i], ys[:, i]]
        return acc

    def relabel(self, perm):
        """Same machine with state ``s`` renamed ``perm[s]``."""
        perm = np.asarray(perm, dtype=np.int64)
        inv = np.argsort(perm)
        g = perm[self.next_state[inv]]
        q = self.output[inv]
        return FiniteStateMetric(g, q, int(perm[self.initial_state]), label=self.label)


class MarkovWindowMetric(Metric):
    """k-th order Markov metric: ``m = sum_i score(window_i)``.

    ``window_i`` is the tuple of the k previous (x, y) pairs followed by the
    current pair, oldest first.  Slots before the start of the sequence hold
    ``BOUNDARY``.  ``score`` is evaluated once per possible window at
    construction; ``evaluate_direct`` calls it afresh and is kept as an
    independent path for cross-checks.
    """

    def __init__(self, order, score, x_size, y_size, label=None, state_cap=2 ** 16):
        if order < 0:
            raise ValueError("Markov order must be nonnegative")
        self.order = int(order)
        self.score = score
        self.x_size, self.y_size = int(x_size), int(y_size)
        self.label = label
        base = self.x_size * self.y_size + 1
        check_cap(base ** (self.order + 1), state_cap, what="Markov windows")
        values = []
        for w in range(base ** (self.order + 1)):
            window = self._decode_window(w)
            # only leading slots may be empty; other windows never occur
            real = [p is not BOUNDARY for p in window]
            values.append(score(window) if real[-1] and real == sorted(real) else 0)
        self.window_table = value_array(values)

    def __repr__(self):
        return f"MarkovWindowMetric(order={self.order}, label={self.label!r})"

    @property
    def _base(self):
        return self.x_size * self.y_size + 1

    def _decode_window(self, index):
        codes = []
        for _ in range(self.order + 1):
            index, c = divmod(index, self._base)
            codes.append(c)
        codes.reverse()
        return tuple(BOUNDARY if c == self._base - 1 else divmod(c, self.y_size) for c in codes)

    def keys(self, xs, ys):
        xs = np.atleast_2d(np.asarray(xs, dtype=np.int64))
        ys = np.atleast_2d(np.asarray(ys, dtype=np.int64))
        codes = xs * self.y_size + ys
        N, n = codes.shape
        pad = np.full((N, self.order), self._base - 1, dtype=np.int64)
        padded = np.concatenate([pad, codes], axis=1)
        acc = np.zeros(N, dtype=object if self.window_table.dtype == object else self.window_table.dtype)
        for i in range(n):
            idx = np.zeros(N, dtype=np.int64)
            for j in range(self.order + 1):
                idx = idx * self._base + padded[:, i + j]
            acc = acc + self.window_table[idx]
        return acc

    def evaluate_direct(self, x, y):
        pairs = [BOUNDARY] * self.order + list(zip((int(v) for v in x), (int(v) for v in y)))
        return sum(self.score(tuple(pairs[i:i + self.order + 1])) for i in range(len(x)))


def markov_as_fsm(metric, state_cap=2 ** 16):
    """Finite-state image of a Markov window metric.

    The output is read from the post-transition state, so for order k >= 1 the
    state must carry the last k+1 pairs (cold-start states hold ``BOUNDARY``
    in the leading slots).  Order 0 needs a single state.
    """
    k, X, Y = metric.order, metric.x_size, metric.y_size
    P = X * Y
    if k == 0:
        g = np.zeros((1, X, Y), dtype=np.int64)
        q = metric.window_table[np.arange(P)].reshape(1, X, Y)
        return FiniteStateMetric(g, q, 0, label=metric.label)
    base = P + 1
    width = k + 1
    check_cap(sum(P ** j for j in range(width + 1)), state_cap, what="Markov states")
    start = (base - 1,) * width
    index = {start: 0}
    order = [start]
    i = 0
    while i < len(order):
        w = order[i]
        for c in range(P):
            nxt = w[1:] + (c,)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
        i += 1
    S = len(order)
    g = np.zeros((S, X, Y), dtype=np.int64)
    q_vals = [[[None] * Y for _ in range(X)] for _ in range(S)]
    for s, w in enumerate(order):
        widx = 0
        for c in w:
            widx = widx * base + c
        for x in range(X):
            for y in range(Y):
                g[s, x, y] = index[w[1:] + (x * Y + y,)]
                q_vals[s][x][y] = metric.window_table[widx]
    return FiniteStateMetric(g, q_vals, 0, label=metric.label)


def markov_state_count(order, x_size, y_size):
    """States used by :func:`markov_as_fsm` (all reachable windows)."""
    P = x_size * y_size
    if order == 0:
        return 1
    return sum(P ** j for j in range(order + 2))


def hamming_metric(x_size, y_size=None, label="-hamming"):
    """m(x, y) = -(number of positions with x_i != y_i), as a one-state machine."""
    y_size = y_size or x_size
    q = [[[0 if a == b else -1 for b in range(y_size)] for a in range(x_size)]]
    return FiniteStateMetric(np.zeros((1, x_size, y_size), dtype=np.int64), q, 0, label=label)


def metric_eval(metric, x, y):
    """m(x, y) for a single pair."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape:
        raise ValueError("x and y must have the same length")
    if metric.x_size:
        validate_sequence(x, metric.x_size)
    if metric.y_size:
        validate_sequence(y, metric.y_size)
    if isinstance(metric, MarkovWindowMetric):
        return metric.evaluate_direct(x, y)
    out = metric.evaluate(x[None], y[None])[0]
    return out.item() if isinstance(out, np.generic) else out


@dataclass(frozen=True)
class MetricFamily:
    """Finite ordered family {m_theta : theta in Theta_n}.  Order fixes argmin tie-breaks."""

    members: tuple
    labels: tuple = ()

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("a metric family needs at least one member")
        labels = tuple(self.labels) or tuple(
            getattr(m, "label", None) or f"m{i}" for i, m in enumerate(members))
        if len(labels) != len(members):
            raise ValueError("one label per member")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    @property
    def x_size(self):
        return next((m.x_size for m in self.members if m.x_size), None)

    @property
    def y_size(self):
        return next((m.y_size for m in self.members if m.y_size), None)


def random_table_metric(rng, x_size, y_size, n, levels=4):
    """Table metric with integer values in ``range(levels)`` (small range forces ties)."""
    values = rng.integers(levels, size=(x_size ** n, y_size ** n))
    return TableMetric(values, x_size, y_size)


def strict_order_metric(x_size, y_size, n, rng=None):
    """A metric inducing a strict total order on X^n for every y (rank, or a random permutation)."""
    nx, ny = x_size ** n, y_size ** n
    if rng is None:
        values = np.repeat(np.arange(nx)[:, None], ny, axis=1)
    else:
        values = np.stack([rng.permutation(nx) for _ in range(ny)], axis=1)
    return TableMetric(values, x_size, y_size, label="strict-order")


__all__ = [
    "BOUNDARY", "Metric", "ConstantMetric", "TableMetric", "ChannelLikelihood",
    "FiniteStateMetric", "MarkovWindowMetric", "MetricFamily", "markov_as_fsm",
    "markov_state_count", "hamming_metric", "metric_eval", "random_table_metric",
    "strict_order_metric", "value_array",
]
