from fractions import Fraction

import numpy as np
import pytest

from univdec import (
    ChannelLikelihood, ConstantMetric, IIDPrior, MetricFamily, TableMetric, avg_error_exact,
    avg_error_mc, bsc, codebook_size, decode, dominance_check, draw_codebook, exponent_compare,
    family_end_to_end_check, gmet_table, hamming_metric, identity_channel, pem_table, redundancy,
    sandwich_check, union_clip_bound, uniform_prior, unrank,
)
from univdec.metrics import random_table_metric, strict_order_metric


def test_codebook_size_rules():
    assert codebook_size(3, 0) == 2
    assert codebook_size(3, Fraction(1, 3)) == 2
    assert codebook_size(3, Fraction(2, 3)) == 4
    assert codebook_size(2, 0.75) == 3


def test_decode_examples():
    m = ChannelLikelihood(identity_channel(2))
    assert decode(np.array([[0, 1]]), (1, 1), m) == 0
    assert decode(np.array([[0, 1], [0, 1]]), (0, 1), m) is None
    words = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])
    assert all(decode(words, words[k], m) == k for k in range(4))
    pick = decode(np.array([[0, 1], [0, 1]]), (0, 1), m, "random", np.random.default_rng(0))
    assert pick in (0, 1)


def test_draw_codebook_reproducible():
    a = draw_codebook(uniform_prior(2, 4), Fraction(1, 2), 5)
    b = draw_codebook(uniform_prior(2, 4), Fraction(1, 2), 5)
    assert len(a) == 4 and (a.codewords == b.codewords).all()


def test_constant_metric_error_one():
    p = uniform_prior(2, 2)
    assert avg_error_exact(p, bsc("0.1"), ConstantMetric(0, 2, 2), 0) == 1
    assert union_clip_bound(p, bsc("0.1"), ConstantMetric(0, 2, 2), 0) == 1
    assert sandwich_check(p, bsc("0.1"), ConstantMetric(0, 2, 2), 0).worst == 1


def test_identity_channel_quarter():
    p = uniform_prior(2, 2)
    m = ChannelLikelihood(identity_channel(2))
    assert avg_error_exact(p, identity_channel(2), m, Fraction(1, 2)) == Fraction(1, 4)


def test_constant_pem_closed_form():
    p = IIDPrior(["1/2", "1/2"], 1)
    m = ConstantMetric(0, 2, 2)
    for M in (2, 4, 8):
        assert avg_error_exact(p, bsc("0.2"), m, None, size=M) == 1 - (1 - 1) ** (M - 1)


def brute_union(p, ch, m, M):
    n = p.n
    t = pem_table(p, m, 2)
    total = Fraction(0)
    for i in range(2 ** n):
        x = unrank(i, 2, n)
        for j in range(2 ** n):
            y = unrank(j, 2, n)
            total += p.mass(x) * ch.likelihood(x, y) * min(Fraction(1), M * t[i, j])
    return total


def test_union_clip_double_loop_oracle():
    p = uniform_prior(2, 3)
    ch = bsc("0.1")
    m = hamming_metric(2)
    assert union_clip_bound(p, ch, m, Fraction(1, 3)) == brute_union(p, ch, m, 2)


def test_union_clip_inactive_clip():
    p = uniform_prior(2, 3)
    m = strict_order_metric(2, 2, 3)
    t = pem_table(p, m, 2)
    # size 1 makes M pem <= 1 everywhere, so the clip is inactive
    ub = union_clip_bound(p, bsc("0.1"), m, None, size=1)
    w, D = p.weights()
    tr, C = bsc("0.1").transition_table(3)
    want = sum(Fraction(int(w[i]), D) * Fraction(int(tr[i, j]), C) * t[i, j] for i in range(8) for j in range(8))
    assert ub == want


def test_sandwich_near_one_for_small_pem():
    p = uniform_prior(2, 3)
    m = strict_order_metric(2, 2, 3)
    rep = sandwich_check(p, identity_channel(2), m, None, size=2)
    assert Fraction(1, 2) <= rep.worst <= 1


def test_dominance_examples():
    p = uniform_prior(2, 3)
    m = hamming_metric(2)
    assert dominance_check(p, m, m).slack == 0
    t = pem_table(p, m, 2)
    canon = TableMetric(-t.num, 2, 2)
    assert dominance_check(p, canon, m).slack == 0
    fam = MetricFamily((m, strict_order_metric(2, 2, 3)))
    g = gmet_table(p, fam, 2)
    K = redundancy(p, fam, 2).K
    rep = dominance_check(p, g.as_metric(), m)
    assert rep.worst <= K


def test_exponent_compare_examples():
    p = uniform_prior(2, 3)
    ch = bsc("0.1")
    m = hamming_metric(2)
    rep = exponent_compare(p, ch, m, m, Fraction(1, 3), 0)
    assert rep.passed and rep.worst <= 1
    rep = exponent_compare(p, ch, m, m, Fraction(1, 3), 10)
    assert rep.details["vacuous"]


def test_gmet_vs_best_member_bsc_family():
    from univdec import build_dmc_family
    fam = build_dmc_family([[["0.95", "0.05"], ["0.05", "0.95"]],
                            [["0.8", "0.2"], ["0.2", "0.8"]],
                            [["0.3", "0.7"], ["0.7", "0.3"]]])
    ch = bsc("0.1")
    for n in (1, 2, 3):
        p = uniform_prior(2, n)
        rate = Fraction(1, n)
        family_end_to_end_check(p, ch, fam, rate)
        g = gmet_table(p, fam, 2).as_metric()
        K = redundancy(p, fam, 2).K
        for m in fam:
            dom = dominance_check(p, g, m)
            assert dom.worst <= K
            rep = exponent_compare(p, ch, g, m, rate, dom.slack)
            assert rep.passed


def test_exact_size_limit():
    with pytest.raises(ValueError):
        avg_error_exact(uniform_prior(2, 1), bsc("0.1"), hamming_metric(2), None, size=2 ** 20)


def test_mc_noiseless_half_collisions():
    # n = 1 uniform: the competitor equals the sent word half the time, a tie
    p = uniform_prior(2, 1)
    est = avg_error_mc(p, identity_channel(2), ChannelLikelihood(identity_channel(2)), 0, 4000, 1)
    assert abs(est.value - 0.5) < 0.05


def test_mc_constant_metric():
    est = avg_error_mc(uniform_prior(2, 3), bsc("0.1"), ConstantMetric(0, 2, 2), Fraction(1, 3), 500, 2)
    assert est.value == 1.0


def test_mc_zero_error_when_codewords_distinct():
    from univdec import UniformOverSet
    p = UniformOverSet([(0, 0, 0)], 2, 3)
    m = ChannelLikelihood(identity_channel(2))
    # the single supported word always collides with itself: every trial is a tie
    assert avg_error_mc(p, identity_channel(2), m, 0, 200, 0).value == 1.0
    words = np.array([[0, 0, 0], [1, 1, 1]])
    assert decode(words, (1, 1, 1), m) == 1


def test_mc_agrees_with_exact_bsc():
    p = uniform_prior(2, 3)
    ch = bsc("0.1")
    m = hamming_metric(2)
    exact = float(avg_error_exact(p, ch, m, Fraction(2, 3)))
    hits = 0
    for s in range(30):
        e = avg_error_mc(p, ch, m, Fraction(2, 3), 2000, s)
        hits += abs(e.value - exact) <= e.ci_halfwidth
    assert hits >= 25


def test_mc_independent_of_jobs():
    args = (uniform_prior(2, 3), bsc("0.2"), hamming_metric(2), Fraction(1, 3), 5000, 3)
    assert avg_error_mc(*args, jobs=1).errors == avg_error_mc(*args, jobs=4).errors


def test_random_tie_break_lowers_error():
    p = uniform_prior(2, 2)
    m = random_table_metric(np.random.default_rng(0), 2, 2, 2, levels=2)
    a = avg_error_mc(p, bsc("0.1"), m, Fraction(1, 2), 4000, 5)
    b = avg_error_mc(p, bsc("0.1"), m, Fraction(1, 2), 4000, 5, tie_break="random")
    assert b.value <= a.value


def test_exact_requires_exact_inputs():
    p = IIDPrior([0.5, 0.5], 2, exact=False)
    with pytest.raises(ValueError):
        avg_error_exact(p, bsc("0.1"), hamming_metric(2), 0)
