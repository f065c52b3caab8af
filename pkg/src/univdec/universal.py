"""The generalized minimum error test (GMET), its approximations and redundancy.

For a family {m_theta} the GMET value is ``min_theta pem_theta(x, y)``; the
universal metric U_n is ``-(1/n) log2`` of it, so a larger U_n means a
smaller best-member pairwise error.  ``K_n = max_y E_Q[1 / GMET(X, y)]`` is
the redundancy, the multiplicative price paid for not knowing which member
to use.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._util import OFF_SUPPORT, CheckReport, log2_fraction, max_ratio as _max_ratio
from .metrics import TableMetric
from .pairwise import (
    ProbTable, class_masses, dense_ranks, inverse_expectation, pem_column, pem_from_keys,
    pem_table, prior_weights,
)
from .sequences import all_sequences, rank, unrank, validate_sequence


@dataclass(frozen=True)
class GmetTable:
    """min_theta pem_theta over all (x, y); ``argmin`` keeps the first minimising member."""

    probs: ProbTable
    argmin: np.ndarray
    n: int
    x_size: int
    y_size: int
    labels: tuple = ()

    def __getitem__(self, idx):
        return self.probs[idx]

    def universal_metric(self, x_rank, y_rank):
        """U_n(x, y) = -(1/n) log2 GMET(x, y)."""
        p = self.probs[x_rank, y_rank]
        if p == 0:
            return OFF_SUPPORT
        return -(log2_fraction(p) if isinstance(p, Fraction) else np.log2(p)) / self.n

    def as_metric(self, label="gmet"):
        """The GMET decoder as a table metric (keys order-equivalent to U_n)."""
        keys = -self.probs.num if self.probs.exact else -self.probs.log2
        return TableMetric(keys, self.x_size, self.y_size, label=label)


@dataclass(frozen=True)
class RedundancyReport:
    K: object
    argmax_y: tuple
    per_y: list
    n: int
    lower_bound: bool = False
    ys: list = field(default_factory=list)

    @property
    def slack(self):
        """(1/n) log2 K_n."""
        K = self.K
        return (log2_fraction(K) if isinstance(K, Fraction) else float(np.log2(K))) / self.n


@dataclass(frozen=True)
class TieClass:
    mass: object
    members: list = None


def _sizes(prior, family, y_size):
    y_size = y_size or family.y_size
    if y_size is None:
        raise ValueError("output alphabet size is needed")
    return prior.alphabet_size, y_size


def member_pem_tables(prior, family, y_size=None, cap=None):
    _, y_size = _sizes(prior, family, y_size)
    return [pem_table(prior, m, y_size, cap) for m in family]


def gmet_table(prior, family, y_size=None, cap=None, tables=None):
    """GMET over every (x, y); members are streamed so large families fit in memory."""
    x_size, y_size = _sizes(prior, family, y_size)
    best = arg = None
    source = tables if tables is not None else (pem_table(prior, m, y_size, cap) for m in family)
    den = None
    for i, t in enumerate(source):
        vals = t.num if t.exact else t.log2
        den = t.den
        if best is None:
            best = vals.copy()
            arg = np.zeros(vals.shape, dtype=np.int64)
            continue
        better = vals < best
        best = np.where(better, vals, best)
        arg[better] = i
    probs = ProbTable(num=best, den=den) if den is not None else ProbTable(log2=best)
    return GmetTable(probs, arg, prior.n, x_size, y_size, tuple(family.labels))


def gmet_value(prior, family, x, y, cap=None):
    """min_theta pem_theta(x, y) at one pair."""
    x = validate_sequence(x, prior.alphabet_size, prior.n)
    r = rank(x, prior.alphabet_size)
    vals = [pem_column(prior, m, y, cap)[r] for m in family]
    return min(vals)


def _output_space(prior, family, y_space, cap):
    if y_space is None or isinstance(y_space, (int, np.integer)):
        y_size = int(y_space) if y_space is not None else family.y_size
        return all_sequences(y_size, prior.n, cap), y_size, False
    ys = np.asarray([np.asarray(y, dtype=np.int64) for y in y_space])
    if ys.ndim != 2 or ys.shape[1] != prior.n:
        raise ValueError(f"outputs must be sequences of length {prior.n}")
    if family.y_size:
        for y in ys:
            validate_sequence(y, family.y_size, prior.n)
    return ys, family.y_size, True


def redundancy(prior, family, y_space=None, cap=None, table=None):
    """K_n = max_y E_Q[2^{n U_n(X, y)}].

    ``y_space`` is the output alphabet size (full enumeration, the default)
    or an explicit list of outputs, in which case the report is a lower bound.
    """
    ys, y_size, partial = _output_space(prior, family, y_space, cap)
    per_y = []
    if not partial:
        table = table or gmet_table(prior, family, y_size, cap)
        for j in range(len(ys)):
            col = ProbTable(num=table.probs.num[:, j], den=table.probs.den) if table.probs.exact \
                else ProbTable(log2=table.probs.log2[:, j])
            per_y.append(inverse_expectation(prior, col, cap))
    else:
        for y in ys:
            cols = [pem_column(prior, m, y, cap) for m in family]
            if cols[0].exact:
                best = ProbTable(num=np.minimum.reduce([c.num for c in cols]), den=cols[0].den)
            else:
                best = ProbTable(log2=np.minimum.reduce([c.log2 for c in cols]))
            per_y.append(inverse_expectation(prior, best, cap))
    finite = [(v, j) for j, v in enumerate(per_y) if v is not OFF_SUPPORT]
    K, j = max(finite, key=lambda t: t[0])
    return RedundancyReport(K, tuple(int(v) for v in ys[j]), per_y, prior.n, partial,
                            [tuple(int(v) for v in y) for y in ys])


def _require_exact(prior):
    if not prior.exact:
        raise ValueError("verification checks run in exact (rational) mode")


def _obj(a):
    return np.asarray(a, dtype=object)


def _support_mask(prior, cap):
    w, _ = prior_weights(prior, cap)
    return np.asarray(np.asarray(w) != 0, dtype=bool)


def theorem1_check(prior, family, x=None, y=None, y_size=None, cap=None, tables=None):
    """Check pe_{U}(x, y) <= pem_theta(x, y) * K_n for every member, x and y.

    Restricts to one pair when ``x`` and ``y`` are given.  ``worst`` is the
    largest pe_U / (pem_theta K_n) found, so it never exceeds 1 on a pass.
    """
    _require_exact(prior)
    x_size, y_size = _sizes(prior, family, y_size)
    tables = tables if tables is not None else member_pem_tables(prior, family, y_size, cap)
    g = gmet_table(prior, family, y_size, cap, tables=tables)
    K = redundancy(prior, family, y_size, cap, table=g).K
    pe_u = pem_from_keys(prior, -g.probs.num, cap)
    mask = np.repeat(_support_mask(prior, cap)[:, None], y_size ** prior.n, axis=1)
    if x is not None and y is not None:
        only = np.zeros_like(mask)
        only[rank(x, x_size), rank(y, y_size)] = True
        mask &= only
    worst = None
    witness = None
    for theta, t in enumerate(tables):
        lhs = _obj(pe_u.num) * K.denominator
        rhs = _obj(t.num) * K.numerator
        ratio, k = _max_ratio(lhs, rhs, mask)
        if ratio is not None and (worst is None or ratio > worst):
            worst = ratio
            xi, yi = np.unravel_index(k, mask.shape)
            witness = (unrank(int(xi), x_size, prior.n), unrank(int(yi), y_size, prior.n), theta)
    passed = worst is None or worst <= 1
    return CheckReport("gmet-domination", passed, worst, log2_fraction(K) / prior.n,
                       witness, K=K, pe_u=pe_u).raise_if_failed()


def tie_class_ids(prior, family, y_size=None, cap=None):
    """Dense id per (x, y) of the class {x' : every member scores x' like x given y}."""
    x_size, y_size = _sizes(prior, family, y_size)
    ids = None
    for m in family:
        r = dense_ranks(m.table(prior.n, x_size, y_size, cap))
        if ids is None:
            ids = r
        else:
            ids = dense_ranks(ids * (int(r.max()) + 1) + r)
    return ids


def _own_class_mass(prior, ids, cap):
    w, den = prior_weights(prior, cap)
    mass = class_masses(ids, w)
    own = np.take_along_axis(mass, ids, axis=0)
    return ProbTable(num=own, den=den) if den is not None else ProbTable(log2=own)


def u2_table(prior, family, y_size=None, cap=None):
    """Q_n(T_n(x|y)) for every pair: the mass of the joint tie class of x."""
    return _own_class_mass(prior, tie_class_ids(prior, family, y_size, cap), cap)


def u1_table(prior, family, y_size=None, cap=None):
    """min_theta Q_n(m_theta(X, y) = m_theta(x, y)) for every pair."""
    x_size, y_size = _sizes(prior, family, y_size)
    best = None
    for m in family:
        t = _own_class_mass(prior, dense_ranks(m.table(prior.n, x_size, y_size, cap)), cap)
        vals = t.num if t.exact else t.log2
        best = vals if best is None else np.minimum(best, vals)
    return ProbTable(num=best, den=t.den) if t.exact else ProbTable(log2=best)


def _column_ids(prior, family, y, cap):
    xs = all_sequences(prior.alphabet_size, prior.n, cap)
    ids = None
    for m in family:
        r = dense_ranks(m.column(xs, y))
        ids = r if ids is None else dense_ranks(ids * (int(r.max()) + 1) + r)
    return ids


def tie_class(prior, family, x, y, cap=None, list_members=True):
    """T_n(x|y) with its prior mass; members listed when ``list_members``."""
    x = validate_sequence(x, prior.alphabet_size, prior.n)
    ids = _column_ids(prior, family, y, cap)
    own = ids[rank(x, prior.alphabet_size)]
    where = np.flatnonzero(ids == own)
    w, den = prior_weights(prior, cap)
    if den is not None:
        mass = Fraction(int(sum(int(v) for v in np.asarray(w)[where])), den)
    else:
        mass = float(np.sum(np.exp2(w[0][where])))
    members = [unrank(int(r), prior.alphabet_size, prior.n) for r in where] if list_members else None
    return TieClass(mass, members)


def u2_value(prior, family, x, y, cap=None):
    """2^{-n U_{n,2}(x, y)} = Q_n(T_n(x|y))."""
    return tie_class(prior, family, x, y, cap, list_members=False).mass


def u1_value(prior, family, x, y, cap=None):
    """2^{-n U_{n,1}(x, y)} = min_theta Q_n(m_theta(X, y) = m_theta(x, y))."""
    x = validate_sequence(x, prior.alphabet_size, prior.n)
    xs = all_sequences(prior.alphabet_size, prior.n, cap)
    r0 = rank(x, prior.alphabet_size)
    w, den = prior_weights(prior, cap)
    out = []
    for m in family:
        r = dense_ranks(m.column(xs, y))
        where = r == r[r0]
        if den is not None:
            out.append(Fraction(int(sum(int(v) for v in np.asarray(w)[where])), den))
        else:
            out.append(float(np.sum(np.exp2(w[0][where]))))
    return min(out)


def approx_conditions_check(prior, family, candidate, y_size=None, cap=None, table=None):
    """Finite-n slacks of an approximating universal metric U'.

    ``candidate`` holds 2^{-n U'(x, y)} as an exact :class:`ProbTable`.
    Reports ``app_slack`` = max over support x and all y of
    log2(2^{-n U'} / 2^{-n U}) and ``kraft_slack`` = max_y log2 E_Q[2^{n U'}],
    both in bits and per symbol.
    """
    _require_exact(prior)
    x_size, y_size = _sizes(prior, family, y_size)
    g = table or gmet_table(prior, family, y_size, cap)
    support = _support_mask(prior, cap)
    mask = np.repeat(support[:, None], y_size ** prior.n, axis=1)
    lhs = _obj(candidate.num) * g.probs.den
    rhs = _obj(g.probs.num) * candidate.den
    ratio, k = _max_ratio(lhs, rhs, mask)
    app_bits = log2_fraction(ratio)
    kraft = []
    for j in range(y_size ** prior.n):
        kraft.append(inverse_expectation(prior, ProbTable(num=candidate.num[:, j], den=candidate.den), cap))
    finite = [v for v in kraft if v is not OFF_SUPPORT]
    kraft_bits = log2_fraction(max(finite)) if finite else float("inf")
    xi, yi = np.unravel_index(k, mask.shape)
    n = prior.n
    return CheckReport("approx-conditions", True, ratio, app_bits / n,
                       (unrank(int(xi), x_size, n), unrank(int(yi), y_size, n)),
                       app_slack_bits=app_bits, kraft_slack_bits=kraft_bits,
                       app_slack=app_bits / n, kraft_slack=kraft_bits / n)


def u2_tightness_check(prior, family, y_size=None, cap=None):
    """Check pe_{U_{n,2}}(x, y) >= Q_n(T_n(x|y)) everywhere; report the upper slack."""
    _require_exact(prior)
    x_size, y_size = _sizes(prior, family, y_size)
    u2 = u2_table(prior, family, y_size, cap)
    pe = pem_from_keys(prior, -_obj(u2.num), cap)
    lower_ok = np.asarray(_obj(pe.num) >= _obj(u2.num), dtype=bool)
    witness = None
    if not lower_ok.all():
        xi, yi = np.unravel_index(int(np.flatnonzero(~lower_ok.ravel())[0]), lower_ok.shape)
        witness = (unrank(int(xi), x_size, prior.n), unrank(int(yi), y_size, prior.n))
    mask = np.asarray(_obj(u2.num) != 0, dtype=bool)
    ratio, _ = _max_ratio(pe.num, u2.num, mask)
    upper_bits = log2_fraction(ratio) if ratio is not None else 0.0
    return CheckReport("u2-tightness", lower_ok.all(), ratio, upper_bits / prior.n, witness,
                       upper_slack_bits=upper_bits, u2=u2, pe_u2=pe).raise_if_failed()


def merged_family_bound(prior, family, y_size=None, cap=None, tables=None):
    """Check E_Q[2^{n U_n(X, y)}] <= sum_theta E_Q[1/pem_theta(X, y)] per y,
    and K_n <= |Theta| * max_theta max_y E_Q[1/pem_theta(X, y)]."""
    _require_exact(prior)
    x_size, y_size = _sizes(prior, family, y_size)
    tables = tables if tables is not None else member_pem_tables(prior, family, y_size, cap)
    g = gmet_table(prior, family, y_size, cap, tables=tables)
    red = redundancy(prior, family, y_size, cap, table=g)
    ny = y_size ** prior.n
    stats = [[inverse_expectation(prior, ProbTable(num=t.num[:, j], den=t.den), cap)
              for j in range(ny)] for t in tables]
    worst = Fraction(0)
    witness = None
    for j in range(ny):
        lhs = red.per_y[j]
        rhs = sum(s[j] for s in stats)
        r = lhs / rhs
        if r > worst:
            worst, witness = r, unrank(j, y_size, prior.n)
    max_stat = max(max(s) for s in stats)
    family_bound = len(family) * max_stat
    passed = worst <= 1 and red.K <= family_bound
    return CheckReport("merged-bound", passed, worst, None, witness, K=red.K,
                       family_bound=family_bound, max_normality=max_stat,
                       normality=stats).raise_if_failed()
