"""Metric-family constructions: DMC likelihoods, finite-state machines, Markov orders."""
from __future__ import annotations

import itertools

import numpy as np

from ._util import check_cap
from .channels import DMC
from .metrics import ChannelLikelihood, FiniteStateMetric, MetricFamily
from .sequences import all_sequences


def build_dmc_family(matrices, exact=True, labels=None):
    """One likelihood metric per DMC matrix.  Each is constant on joint types."""
    members = tuple(ChannelLikelihood(DMC(m, exact=exact)) for m in matrices)
    labels = labels or tuple(f"dmc{i}" for i in range(len(members)))
    return MetricFamily(members, tuple(labels))


def fsm_count_bound(num_states, x_size, y_size, n):
    """B_n = S^(S|X||Y|) (n+1)^(|X||Y|S): next-state functions times joint state types."""
    S, P = num_states, x_size * y_size
    return S ** (S * P) * (n + 1) ** (P * S)


def next_state_functions(num_states, x_size, y_size):
    """Every next-state table g[s][x][y] in lexicographic order."""
    cells = num_states * x_size * y_size
    for flat in itertools.product(range(num_states), repeat=cells):
        yield np.asarray(flat, dtype=np.int64).reshape(num_states, x_size, y_size)


def build_fsm_family(num_states, x_size, y_size, n, samples=None, seed=0,
                     q_values=(-2, -1, 0, 1, 2), cap=4096):
    """Finite-state metrics over distinct next-state functions, with random integer outputs.

    Exhaustive over next-state functions when ``samples`` is None (subject
    to ``cap``); otherwise ``samples`` distinct functions drawn at random.
    Returns the family and the count bound B_n.
    """
    S = num_states
    cells = S * x_size * y_size
    total = S ** cells
    rng = np.random.default_rng(seed)
    if samples is None:
        check_cap(total, cap, what="next-state functions")
        tables = list(next_state_functions(S, x_size, y_size))
    else:
        if samples > total:
            raise ValueError(f"only {total} distinct next-state functions exist")
        chosen = set()
        tables = []
        while len(tables) < samples:
            g = rng.integers(S, size=(S, x_size, y_size))
            key = g.tobytes()
            if key not in chosen:
                chosen.add(key)
                tables.append(g)
    members = []
    for i, g in enumerate(tables):
        q = rng.choice(np.asarray(q_values), size=(S, x_size, y_size))
        members.append(FiniteStateMetric(g, q, 0, label=f"fsm{i}"))
    return MetricFamily(tuple(members)), fsm_count_bound(S, x_size, y_size, n)


def build_degenerate_fsm(x, y, x_size, y_size):
    """An n-state machine that visits a different state at every time step.

    Scores 1 whenever (x_i, y_i) matches the target pair at that time, so
    the target x is the unique maximiser given the target y.
    """
    x = [int(v) for v in x]
    y = [int(v) for v in y]
    n = len(x)
    if len(y) != n or n == 0:
        raise ValueError("x and y must have the same positive length")
    g = np.empty((n, x_size, y_size), dtype=np.int64)
    q = np.zeros((n, x_size, y_size), dtype=np.int64)
    for s in range(n):
        g[s] = (s + 1) % n
        # state s is occupied at time s (1-based), state 0 at time n
        t = (s if s else n) - 1
        q[s, x[t], y[t]] = 1
    return FiniteStateMetric(g, q, 0, label=f"degenerate{tuple(x)}|{tuple(y)}")


def degenerate_fsm_family(n, x_size, y_size, pairs=None, cap=None):
    """Degenerate machines for the given (x, y) pairs, or for every pair."""
    if pairs is None:
        xs = all_sequences(x_size, n, cap)
        ys = all_sequences(y_size, n, cap)
        pairs = ((a, b) for a in xs for b in ys)
    return MetricFamily(tuple(build_degenerate_fsm(a, b, x_size, y_size) for a, b in pairs))


def markov_order_limit(n, x_size, y_size):
    """Largest k with k < log2(n) / log2(|X||Y|), i.e. (|X||Y|)^k < n."""
    if n < 2:
        raise ValueError("n must be at least 2")
    P = x_size * y_size
    if P < 2:
        raise ValueError("the bound is unbounded for a single joint symbol")
    k = 0
    while P ** (k + 1) < n:
        k += 1
    return k
