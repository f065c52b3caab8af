"""Pairwise error probabilities and canonical metrics.

``pem(x, y) = Q_n(m(X, y) >= m(x, y))`` with ties counted as errors.  The
exact engine turns each column of metric keys (fixed y) into dense ranks
and accumulates prior weights from the top rank down, so every pem in a
column costs one sort.  Exact mode stays in integers over the prior's
denominator; float mode accumulates log2 masses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._util import FLOAT_TIE_TOL, OFF_SUPPORT, float_ge, is_exact_number, log2_fraction
from .sequences import all_sequences, rank, validate_sequence


@dataclass(frozen=True)
class ProbTable:
    """Probabilities indexed like a metric table.

    Exact tables hold integer numerators ``num`` over one denominator ``den``;
    float tables hold ``log2`` values.
    """

    num: np.ndarray = None
    den: int = None
    log2: np.ndarray = None

    @property
    def exact(self):
        return self.num is not None

    @property
    def shape(self):
        return (self.num if self.exact else self.log2).shape

    def __getitem__(self, idx):
        if self.exact:
            return Fraction(int(self.num[idx]), self.den)
        return float(2.0 ** self.log2[idx])

    def log2_values(self):
        if not self.exact:
            return self.log2
        num = np.asarray(self.num, dtype=object)
        out = np.array([log2_fraction(Fraction(int(v), self.den)) for v in num.ravel()])
        return out.reshape(num.shape)

    def fractions(self):
        if not self.exact:
            raise ValueError("float table has no exact values")
        num = np.asarray(self.num, dtype=object)
        out = np.empty(num.shape, dtype=object)
        out.ravel()[:] = [Fraction(int(v), self.den) for v in num.ravel()]
        return out


@dataclass(frozen=True)
class PairwiseResult:
    value: object
    method: str
    trials: int = None
    ci_halfwidth: float = None

    def __float__(self):
        return float(self.value)


def dense_ranks(keys, tol=FLOAT_TIE_TOL):
    """Dense ranks of ``keys`` down axis 0, independently per column.

    Integer and rational keys compare exactly.  Float keys within ``tol``
    relative of their sorted neighbour are merged into one rank (chained,
    so a run of near-equal values becomes a single tie class).
    """
    keys = np.asarray(keys)
    squeeze = keys.ndim == 1
    if squeeze:
        keys = keys[:, None]
    if keys.dtype == object:
        flat = keys.ravel()
        if all(is_exact_number(v) or (isinstance(v, float) and math.isinf(v)) for v in flat):
            out = np.empty(keys.shape, dtype=np.int64)
            for j in range(keys.shape[1]):
                col = list(keys[:, j])
                lookup = {v: r for r, v in enumerate(sorted(set(col)))}
                out[:, j] = [lookup[v] for v in col]
            return out[:, 0] if squeeze else out
        keys = keys.astype(float)
    order = np.argsort(keys, axis=0, kind="stable")
    srt = np.take_along_axis(keys, order, axis=0)
    if np.issubdtype(keys.dtype, np.floating):
        a, b = srt[:-1], srt[1:]
        with np.errstate(invalid="ignore"):
            tied = (a == b) | (np.abs(b - a) <= tol * np.maximum(np.abs(a), np.abs(b)))
        step = ~tied
    else:
        step = srt[1:] != srt[:-1]
    rank_sorted = np.concatenate(
        [np.zeros((1, keys.shape[1]), dtype=np.int64), np.cumsum(step, axis=0)], axis=0)
    out = np.empty_like(rank_sorted)
    np.put_along_axis(out, order, rank_sorted, axis=0)
    return out[:, 0] if squeeze else out


def class_masses(ranks, weights):
    """Per-column mass of every rank class: shape (max rank + 1, columns)."""
    ranks = np.asarray(ranks)
    cols = np.arange(ranks.shape[1])[None, :]
    K = int(ranks.max()) + 1 if ranks.size else 1
    if isinstance(weights, tuple):
        lw = weights[0]
        mass = np.full((K, ranks.shape[1]), -np.inf)
        np.logaddexp2.at(mass, (ranks, cols), np.broadcast_to(lw[:, None], ranks.shape))
        return mass
    w = np.asarray(weights)
    mass = np.zeros((K, ranks.shape[1]), dtype=w.dtype)
    np.add.at(mass, (ranks, cols), np.broadcast_to(w[:, None], ranks.shape))
    return mass


def survival_from_ranks(ranks, weights):
    """For each cell, the total weight of cells in the same column with rank >= its rank.

    ``weights`` is an integer array (exact) or a 1-tuple holding log2 masses.
    """
    mass = class_masses(ranks, weights)
    if isinstance(weights, tuple):
        surv = np.flip(np.logaddexp2.accumulate(np.flip(mass, 0), axis=0), 0)
    else:
        surv = np.flip(np.cumsum(np.flip(mass, 0), axis=0), 0)
    return np.take_along_axis(surv, ranks, axis=0)


def prior_weights(prior, cap=None):
    """Weights in the form the engine expects, plus the denominator (None in float mode)."""
    if prior.exact:
        return prior.weights(cap)
    return (prior.log2_masses(cap),), None


def pem_from_keys(prior, keys, cap=None):
    """Pairwise-error table from a key table indexed [x, y] (or a single key column)."""
    w, den = prior_weights(prior, cap)
    keys = np.asarray(keys)
    column = keys.ndim == 1
    r = dense_ranks(keys[:, None] if column else keys)
    surv = survival_from_ranks(r, w)
    if column:
        surv = surv[:, 0]
    if den is None:
        # rounding can push a full-mass sum a hair above probability 1
        return ProbTable(log2=np.minimum(surv, 0.0))
    return ProbTable(num=surv, den=den)


def pem_table(prior, metric, y_size=None, cap=None):
    """pem(x, y) for every pair, as a :class:`ProbTable` indexed [rank x, rank y]."""
    y_size = y_size or metric.y_size
    keys = metric.table(prior.n, prior.alphabet_size, y_size, cap)
    return pem_from_keys(prior, keys, cap)


def pem_column(prior, metric, y, cap=None):
    """pem(x', y) for every x' (rank order) at one output y."""
    xs = all_sequences(prior.alphabet_size, prior.n, cap)
    return pem_from_keys(prior, metric.column(xs, y), cap)


def _check_output(metric, y, n):
    if metric.y_size:
        return validate_sequence(y, metric.y_size, n)
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (n,):
        raise ValueError(f"output sequence must have length {n}")
    return y


def pairwise_error_exact(prior, metric, x, y, cap=None):
    x = validate_sequence(x, prior.alphabet_size, prior.n)
    y = _check_output(metric, y, prior.n)
    col = pem_column(prior, metric, y, cap)
    return PairwiseResult(col[rank(x, prior.alphabet_size)], "exact-enumeration")


def pairwise_error_mc(prior, metric, x, y, trials, seed, batch=8192):
    """Frequency estimate of pem(x, y) from ``trials`` independent draws of X ~ Q_n."""
    if trials < 1:
        raise ValueError("trials must be positive")
    x = validate_sequence(x, prior.alphabet_size, prior.n)
    y = _check_output(metric, y, prior.n)
    ref = metric.column(x[None], y)
    streams = np.random.SeedSequence(seed).spawn(-(-trials // batch))
    hits = 0
    for i, ss in enumerate(streams):
        size = min(batch, trials - i * batch)
        draws = prior.sample(np.random.default_rng(ss), size)
        k = metric.column(draws, y)
        hits += int(np.count_nonzero(_ge(k, ref[0])))
    p = hits / trials
    half = 1.959963984540054 * math.sqrt(p * (1 - p) / trials)
    return PairwiseResult(p, "monte-carlo", trials=trials, ci_halfwidth=half)


def _ge(keys, ref):
    keys = np.asarray(keys)
    if np.issubdtype(keys.dtype, np.floating) or isinstance(ref, (float, np.floating)):
        return float_ge(keys.astype(float), float(ref))
    if keys.dtype == object:
        return np.fromiter((k >= ref for k in keys), dtype=bool, count=len(keys))
    return keys >= ref


def canonical_from_pem(pem, n):
    """-(1/n) log2 pem, with the off-support sentinel for pem = 0."""
    if pem == 0:
        return OFF_SUPPORT
    return -(log2_fraction(pem) if isinstance(pem, Fraction) else math.log2(pem)) / n


def canonical_metric(prior, metric, x, y, cap=None):
    """The canonical metric -(1/n) log2 pem(x, y); ``OFF_SUPPORT`` when pem vanishes."""
    pem = pairwise_error_exact(prior, metric, x, y, cap).value
    return canonical_from_pem(pem, prior.n)


def inverse_expectation(prior, probs_column, cap=None):
    """E_Q[1 / p(X)] over the prior support for one column of probabilities.

    In exact mode the prior denominator cancels: the sum is over w(x) / num(x).
    Returns ``OFF_SUPPORT`` if p vanishes somewhere on the support.
    """
    w, den = prior_weights(prior, cap)
    if den is None:
        lw = w[0]
        lp = np.asarray(probs_column.log2 if isinstance(probs_column, ProbTable) else probs_column)
        on = np.isfinite(lw)
        if np.any(~np.isfinite(lp[on])):
            return OFF_SUPPORT
        return float(np.sum(np.exp2(lw[on] - lp[on])))
    num = probs_column.num if isinstance(probs_column, ProbTable) else probs_column
    total = Fraction(0)
    for wi, pi in zip(np.asarray(w).tolist(), np.asarray(num).tolist()):
        if wi:
            if pi == 0:
                return OFF_SUPPORT
            total += Fraction(int(wi), int(pi))
    return total


def normality_statistic(prior, metric, y, cap=None):
    """E_Q[2^{n * canonical metric(X, y)}] = E_Q[1 / pem(X, y)]."""
    return inverse_expectation(prior, pem_column(prior, metric, y, cap), cap)
