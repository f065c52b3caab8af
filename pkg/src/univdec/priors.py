"""Random-coding priors Q_n over X^n.

Every prior runs in one of two modes.  Exact mode keeps masses as integer
weights over a common denominator, so sums and comparisons are exact
rationals.  Float mode keeps log2 masses and is meant for blocklengths too
large to enumerate exactly.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ._util import FLOAT_SUM_TOL, int_array, lcm_all, log2_fraction, to_fraction
from .sequences import all_sequences, rank, unrank, validate_sequence


class Prior:
    """Base class.  Subclasses fill in ``alphabet_size``, ``n`` and ``exact``."""

    alphabet_size: int
    n: int
    exact: bool

    def weights(self, cap=None):
        """Integer weights over all sequences in rank order, and their denominator."""
        raise NotImplementedError

    def log2_masses(self, cap=None):
        raise NotImplementedError

    def mass(self, x):
        """Exact mass of ``x`` (exact mode only)."""
        raise NotImplementedError

    def log2_mass(self, x):
        raise NotImplementedError

    def sample(self, rng, size):
        raise NotImplementedError

    def support_min_mass(self):
        raise NotImplementedError

    def masses(self, cap=None):
        """Exact masses as a list of Fractions in rank order."""
        w, den = self.weights(cap)
        return [Fraction(int(v), den) for v in w]

    def _require_exact(self):
        if not self.exact:
            raise ValueError("operation needs an exact-mode prior")

    def _check(self, x):
        return validate_sequence(x, self.alphabet_size, self.n)


class IIDPrior(Prior):
    """Product prior: each symbol drawn independently from ``probs``."""

    def __init__(self, probs, n, exact=True):
        if n < 1:
            raise ValueError("blocklength must be positive")
        self.n = int(n)
        self.alphabet_size = len(probs)
        self.exact = exact
        if exact:
            self.probs = tuple(to_fraction(p) for p in probs)
            if any(p < 0 for p in self.probs):
                raise ValueError("negative probability")
            if sum(self.probs) != 1:
                raise ValueError(f"symbol probabilities sum to {sum(self.probs)}, not 1")
            self._den1 = lcm_all(p.denominator for p in self.probs)
            self._num1 = [int(p * self._den1) for p in self.probs]
            self._fprobs = np.array([float(p) for p in self.probs])
        else:
            self.probs = tuple(float(p) for p in probs)
            total = math.fsum(self.probs)
            if any(p < 0 for p in self.probs) or abs(total - 1) > FLOAT_SUM_TOL:
                raise ValueError(f"symbol probabilities sum to {total}, not 1")
            self._fprobs = np.array(self.probs)
        with np.errstate(divide="ignore"):
            self._log2p = np.log2(self._fprobs)
        if not (self._fprobs > 0).any():
            raise ValueError("empty support")

    def __repr__(self):
        return f"IIDPrior({[str(p) for p in self.probs]}, n={self.n}, exact={self.exact})"

    def weights(self, cap=None):
        self._require_exact()
        xs = all_sequences(self.alphabet_size, self.n, cap)
        den = self._den1 ** self.n
        num = self._num1
        if den < 2 ** 62:
            w = np.prod(np.asarray(num, dtype=np.int64)[xs], axis=1)
        else:
            w = int_array([math.prod(num[s] for s in row) for row in xs.tolist()])
        return w, den

    def log2_masses(self, cap=None):
        xs = all_sequences(self.alphabet_size, self.n, cap)
        return self._log2p[xs].sum(axis=1)

    def mass(self, x):
        self._require_exact()
        x = self._check(x)
        return math.prod((self.probs[s] for s in x.tolist()), start=Fraction(1))

    def log2_mass(self, x):
        x = self._check(x)
        return float(self._log2p[x].sum())

    def sample(self, rng, size):
        return rng.choice(self.alphabet_size, size=(size, self.n), p=self._fprobs)

    def support_min_mass(self):
        return min(p for p in self.probs if p > 0) ** self.n


class UniformOverSet(Prior):
    """Uniform prior over an explicit support set B_n."""

    def __init__(self, support, alphabet_size, n=None, exact=True):
        rows = [tuple(int(s) for s in seq) for seq in support]
        if not rows:
            raise ValueError("empty support")
        self.n = len(rows[0]) if n is None else int(n)
        self.alphabet_size = int(alphabet_size)
        self.exact = exact
        for r in rows:
            validate_sequence(r, self.alphabet_size, self.n)
        self.support = tuple(sorted(set(rows), key=lambda r: rank(r, self.alphabet_size)))
        if len(self.support) != len(rows):
            raise ValueError("support set lists a sequence twice")
        self._ranks = np.array([rank(r, self.alphabet_size) for r in self.support], dtype=np.int64)
        self._rank_set = set(self._ranks.tolist())

    def __repr__(self):
        return f"UniformOverSet(|B|={len(self.support)}, n={self.n})"

    def weights(self, cap=None):
        self._require_exact()
        total = self.alphabet_size ** self.n
        all_sequences(self.alphabet_size, self.n, cap)  # cap check only
        w = np.zeros(total, dtype=np.int64)
        w[self._ranks] = 1
        return w, len(self.support)

    def log2_masses(self, cap=None):
        total = self.alphabet_size ** self.n
        all_sequences(self.alphabet_size, self.n, cap)
        out = np.full(total, -np.inf)
        out[self._ranks] = -math.log2(len(self.support))
        return out

    def mass(self, x):
        self._require_exact()
        x = self._check(x)
        return Fraction(1, len(self.support)) if rank(x, self.alphabet_size) in self._rank_set else Fraction(0)

    def log2_mass(self, x):
        x = self._check(x)
        if rank(x, self.alphabet_size) in self._rank_set:
            return -math.log2(len(self.support))
        return -math.inf

    def sample(self, rng, size):
        idx = rng.integers(len(self.support), size=size)
        return np.asarray(self.support, dtype=np.int64)[idx]

    def support_min_mass(self):
        return Fraction(1, len(self.support)) if self.exact else 1.0 / len(self.support)


class ExplicitTable(Prior):
    """Prior given as an explicit mass per sequence; unlisted sequences get zero mass."""

    def __init__(self, masses, alphabet_size, n, exact=True):
        self.alphabet_size = int(alphabet_size)
        self.n = int(n)
        self.exact = exact
        table = {}
        for seq, m in dict(masses).items():
            seq = tuple(int(s) for s in seq)
            validate_sequence(seq, self.alphabet_size, self.n)
            table[rank(seq, self.alphabet_size)] = to_fraction(m) if exact else float(m)
        if any(m < 0 for m in table.values()):
            raise ValueError("negative mass")
        table = {r: m for r, m in table.items() if m != 0}
        if not table:
            raise ValueError("empty support")
        total = sum(table.values()) if exact else math.fsum(table.values())
        if exact and total != 1:
            raise ValueError(f"masses sum to {total}, not 1")
        if not exact and abs(total - 1) > FLOAT_SUM_TOL:
            raise ValueError(f"masses sum to {total}, not 1")
        self.table = dict(sorted(table.items()))
        if exact:
            self._den = lcm_all(m.denominator for m in self.table.values())
        self._keys = np.array(list(self.table), dtype=np.int64)
        self._fmass = np.array([float(m) for m in self.table.values()])
        self._fmass /= self._fmass.sum()

    def __repr__(self):
        return f"ExplicitTable(|supp|={len(self.table)}, n={self.n})"

    def weights(self, cap=None):
        self._require_exact()
        total = self.alphabet_size ** self.n
        all_sequences(self.alphabet_size, self.n, cap)
        w = int_array([0] * total, bound=self._den)
        for r, m in self.table.items():
            w[r] = int(m * self._den)
        return w, self._den

    def log2_masses(self, cap=None):
        total = self.alphabet_size ** self.n
        all_sequences(self.alphabet_size, self.n, cap)
        out = np.full(total, -np.inf)
        for r, m in self.table.items():
            out[r] = log2_fraction(m) if self.exact else math.log2(m)
        return out

    def mass(self, x):
        self._require_exact()
        x = self._check(x)
        return self.table.get(rank(x, self.alphabet_size), Fraction(0))

    def log2_mass(self, x):
        x = self._check(x)
        m = self.table.get(rank(x, self.alphabet_size), 0)
        if m == 0:
            return -math.inf
        return log2_fraction(m) if self.exact else math.log2(m)

    def sample(self, rng, size):
        idx = rng.choice(len(self._keys), size=size, p=self._fmass)
        return np.array([unrank(int(r), self.alphabet_size, self.n) for r in self._keys[idx]],
                        dtype=np.int64).reshape(size, self.n)

    def support_min_mass(self):
        return min(self.table.values())


def uniform_prior(alphabet_size, n, exact=True):
    """IID uniform prior, i.e. uniform over all of X^n."""
    p = Fraction(1, alphabet_size) if exact else 1.0 / alphabet_size
    return IIDPrior([p] * alphabet_size, n, exact=exact)


def prior_mass(prior, x):
    """Q_n(x): a Fraction in exact mode, a log2 value in float mode."""
    if prior.exact:
        return prior.mass(x)
    return prior.log2_mass(x)


def prior_chi(prior):
    """chi_n = -log2 of the smallest positive mass.  Divide by ``prior.n`` for the per-symbol slack."""
    m = prior.support_min_mass()
    return -log2_fraction(m) if prior.exact else -math.log2(m)


def sequence_ranks_in_support(prior, cap=None):
    if prior.exact:
        w, _ = prior.weights(cap)
        return np.flatnonzero(np.asarray(w != 0, dtype=bool))
    return np.flatnonzero(np.isfinite(prior.log2_masses(cap)))


