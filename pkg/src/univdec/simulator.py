"""Random codes, metric decoders, and average error probability.

Under the iid-codeword ensemble the message index is irrelevant, so the
exact oracle conditions on codeword 0 being sent: the decoder errs unless
every one of the M - 1 independent competitors scores strictly below the
transmitted word, giving

    P_e = E_{Q x W}[1 - (1 - pem(X, Y))^(M - 1)].

The operational decoder treats a tie for the maximum as an error, which is
exactly the convention built into pem.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._util import FLOAT_TIE_TOL, CheckReport, VerificationError, le_pow2, log2_fraction, max_ratio
from .pairwise import _ge, pem_table, prior_weights
from .sequences import unrank

Z95 = 1.959963984540054
# Beyond this codebook size the exact closed form needs integers of
# M * log2(D) bits per cell; comparisons switch to bounds or floats.
EXACT_SIZE_LIMIT = 2 ** 14


def codebook_size(n, rate):
    """M = max(2, ceil(2^{nR})), exact when n*R is an integer."""
    nr = Fraction(rate) * n if isinstance(rate, (int, Fraction)) else rate * n
    if isinstance(nr, Fraction) and nr.denominator == 1:
        size = 2 ** int(nr) if nr >= 0 else 1
    else:
        size = math.ceil(2.0 ** float(nr) - 1e-12)
    return max(2, int(size))


@dataclass(frozen=True)
class Codebook:
    codewords: np.ndarray
    seed: object
    rate: object

    def __len__(self):
        return len(self.codewords)


def draw_codebook(prior, rate, seed):
    """M codewords drawn iid from the prior."""
    M = codebook_size(prior.n, rate)
    rng = np.random.default_rng(seed)
    return Codebook(prior.sample(rng, M), seed, rate)


def decode(codebook, y, metric, tie_break="error", rng=None):
    """Index of the codeword with the largest metric; ``None`` on a tie for the maximum.

    With ``tie_break="random"`` a tied maximum is resolved uniformly instead.
    """
    words = codebook.codewords if isinstance(codebook, Codebook) else np.asarray(codebook)
    if len(words) == 0:
        raise ValueError("empty codebook")
    keys = metric.column(words, y)
    best = np.flatnonzero(_ge(keys, _max_key(keys)))
    if len(best) == 1:
        return int(best[0])
    if tie_break == "random":
        rng = rng or np.random.default_rng()
        return int(rng.choice(best))
    return None


def _max_key(keys):
    if keys.dtype == object:
        return max(keys)
    return keys.max()


def _exact_inputs(prior, channel, metric, cap):
    if not (prior.exact and channel.exact):
        raise ValueError("exact error probabilities need exact prior and channel")
    w, D = prior_weights(prior, cap)
    t, C = channel.transition_table(prior.n, cap)
    pem = pem_table(prior, metric, channel.output_size, cap)
    return np.asarray(w, dtype=object), D, np.asarray(t, dtype=object), C, np.asarray(pem.num, dtype=object)


def avg_error_exact(prior, channel, metric, rate, cap=None, size=None):
    """Ensemble-average error probability (ties are errors), as a Fraction.

    ``size`` overrides the codebook size derived from ``rate``.
    """
    M = size or codebook_size(prior.n, rate)
    if M > EXACT_SIZE_LIMIT:
        raise ValueError(f"M = {M} is too large for the exact closed form (limit {EXACT_SIZE_LIMIT})")
    w, D, t, C, p = _exact_inputs(prior, channel, metric, cap)
    joint = w[:, None] * t
    miss = D ** (M - 1) - (D - p) ** (M - 1)
    total = int(np.sum(joint * miss))
    return Fraction(total, D * C * D ** (M - 1))


def avg_error_float(prior, channel, metric, rate, cap=None, size=None):
    """The same closed form in floating point, usable for any codebook size."""
    M = size or codebook_size(prior.n, rate)
    w, D, t, C, p = _exact_inputs(prior, channel, metric, cap)
    pem = np.array([[float(Fraction(int(v), D)) for v in row] for row in p])
    with np.errstate(divide="ignore"):
        miss = -np.expm1((M - 1) * np.log1p(-pem))
    joint = np.array([[float(Fraction(int(a) * int(b), D * C)) for b in row] for a, row in zip(w, t)])
    return float(np.sum(joint * miss))


def union_clip_bound(prior, channel, metric, rate, cap=None, size=None):
    """E_{Q x W}[min(1, M pem(X, Y))] with M the codebook size for ``rate``."""
    M = size or codebook_size(prior.n, rate)
    w, D, t, C, p = _exact_inputs(prior, channel, metric, cap)
    clipped = np.minimum(M * p, D)
    return Fraction(int(np.sum(w[:, None] * t * clipped)), D * C * D)


def sandwich_check(prior, channel, metric, rate, cap=None, size=None):
    """P_e / E[min(1, M pem)] must lie in [1/2, 1]."""
    pe = avg_error_exact(prior, channel, metric, rate, cap, size)
    ub = union_clip_bound(prior, channel, metric, rate, cap, size)
    ratio = pe / ub if ub else Fraction(1)
    ok = Fraction(1, 2) <= ratio <= 1
    return CheckReport("sandwich", ok, ratio, None, None if ok else ("rate", rate),
                       P_e=pe, union_clip=ub, M=size or codebook_size(prior.n, rate)).raise_if_failed()


def dominance_check(prior, u, m, lam=None, y_size=None, cap=None):
    """Minimal lambda with pe_u(x, y) <= pe_m(x, y) 2^{n lambda} on the support.

    Passes when that minimum does not exceed ``lam`` (no threshold if None).
    """
    if not prior.exact:
        raise ValueError("dominance checks run in exact mode")
    y_size = y_size or u.y_size or m.y_size
    pu = pem_table(prior, u, y_size, cap)
    pm = pem_table(prior, m, y_size, cap)
    w, _ = prior_weights(prior, cap)
    mask = np.repeat((np.asarray(w) != 0)[:, None], pu.shape[1], axis=1)
    best, k = max_ratio(pu.num, pm.num, mask)
    lam_min = log2_fraction(best) / prior.n
    passed = True if lam is None else le_pow2(best, _n_times(lam, prior.n))
    xi, yi = np.unravel_index(k, mask.shape)
    witness = (unrank(int(xi), prior.alphabet_size, prior.n), unrank(int(yi), y_size, prior.n))
    return CheckReport("dominance", passed, best, lam_min, witness)


def _n_times(lam, n):
    return Fraction(lam) * n if isinstance(lam, (int, Fraction)) else float(lam) * n


def exponent_compare(prior, channel, u, m, rate, lam, cap=None):
    """Check P_u(R) <= 2 * 2^{n lam} P_m(R) and P_u(R) <= 2 P_m(rate with M' codewords).

    Uses lam clamped at 0.  M' = max(2, ceil((M - 1) 2^{n lam})) is the
    smallest codebook the comparison needs, i.e. the integer version of R + lam.
    """
    lam_pos = max(lam, 0)
    n = prior.n
    M = codebook_size(n, rate)
    pu = avg_error_exact(prior, channel, u, rate, cap)
    pm = avg_error_exact(prior, channel, m, rate, cap)
    scale_exp = _n_times(lam_pos, n)
    first = le_pow2(pu / (2 * pm), scale_exp) if pm else pu == 0
    if isinstance(scale_exp, Fraction) and scale_exp.denominator == 1:
        M2 = max(2, (M - 1) * 2 ** int(scale_exp))
    else:
        M2 = max(2, math.ceil((M - 1) * 2.0 ** float(scale_exp) - 1e-12))
    if M2 <= EXACT_SIZE_LIMIT:
        pm2 = avg_error_exact(prior, channel, m, rate, cap, size=M2)
        second, method = pu <= 2 * pm2, "exact"
    else:
        # P_m(M') >= E[min(1, M' pem)] / 2, so pu <= that bound certifies the claim
        pm2 = union_clip_bound(prior, channel, m, rate, cap, size=M2) / 2
        second, method = pu <= 2 * pm2, "lower-bound"
        if not second:
            pm2 = avg_error_float(prior, channel, m, rate, cap, size=M2)
            second, method = float(pu) <= 2 * pm2 * (1 + FLOAT_TIE_TOL), "float"
    vacuous = le_pow2(1 / (2 * pm), scale_exp) if pm else True
    report = CheckReport("exponent-compare", first and second, pu / (2 * pm) if pm else None, lam_pos, None,
                         P_u=pu, P_m=pm, P_m_shifted=pm2, M=M, M_shifted=M2, vacuous=vacuous,
                         shifted_method=method)
    return report.raise_if_failed()


@dataclass(frozen=True)
class MCEstimate:
    value: float
    ci_halfwidth: float
    trials: int
    errors: int
    seed: object


def _trial_chunk(prior, channel, metric, M, size, seed_seq, tie_break):
    rng = np.random.default_rng(seed_seq)
    n = prior.n
    words = prior.sample(rng, size * M).reshape(size, M, n)
    msg = rng.integers(M, size=size)
    sent = words[np.arange(size), msg]
    ys = channel.sample(sent, rng)
    keys = metric.keys(words.reshape(size * M, n), np.repeat(ys, M, axis=0)).reshape(size, M)
    ref = keys[np.arange(size), msg]
    errors = 0
    for t in range(size):
        beats = _ge(keys[t], ref[t])
        beats[msg[t]] = False
        if beats.any():
            if tie_break == "random":
                row = keys[t]
                if keys.dtype.kind == "f":
                    strictly = row > ref[t] + FLOAT_TIE_TOL * abs(ref[t])
                else:
                    strictly = np.array([k > ref[t] for k in row]) if keys.dtype == object else row > ref[t]
                if strictly.any() or rng.random() >= 1.0 / (1 + beats.sum()):
                    errors += 1
            else:
                errors += 1
    return errors


def avg_error_mc(prior, channel, metric, rate, trials, seed, tie_break="error", jobs=1, chunk=1024):
    """Monte Carlo estimate of the average error probability.

    Each trial draws a fresh codebook, a uniform message and a channel output,
    then decodes.  Trials run in fixed chunks with their own spawned seeds, so
    the estimate does not depend on ``jobs``.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    M = codebook_size(prior.n, rate)
    sizes = [min(chunk, trials - k) for k in range(0, trials, chunk)]
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    args = [(prior, channel, metric, M, s, q, tie_break) for s, q in zip(sizes, seqs)]
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            counts = list(pool.map(lambda a: _trial_chunk(*a), args))
    else:
        counts = [_trial_chunk(*a) for a in args]
    errors = sum(counts)
    p = errors / trials
    return MCEstimate(p, Z95 * math.sqrt(p * (1 - p) / trials), trials, errors, seed)


def family_end_to_end_check(prior, channel, family, rate, cap=None):
    """P_e(GMET) <= 2 K_n P_e(m_theta) for every member (exact)."""
    from .universal import gmet_table, redundancy
    g = gmet_table(prior, family, channel.output_size, cap)
    K = redundancy(prior, family, channel.output_size, cap, table=g).K
    pu = avg_error_exact(prior, channel, g.as_metric(), rate, cap)
    per = [avg_error_exact(prior, channel, m, rate, cap) for m in family]
    best = min(per)
    worst = pu / (2 * K * best) if best else None
    ok = pu <= 2 * K * best
    report = CheckReport("gmet-end-to-end", ok, worst, None, None if ok else per.index(best),
                         P_gmet=pu, P_members=per, K=K)
    if not ok:
        raise VerificationError("GMET error exceeds 2 K_n times the best member", per.index(best), report)
    return report
