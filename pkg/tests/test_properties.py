"""Property-based checks of the invariants, on small random instances."""
from fractions import Fraction

import numpy as np
from hypothesis import HealthCheck, given, settings, strategies as st

from univdec import (
    IIDPrior, MetricFamily, RateFunction, TableMetric, avg_error_mc, canonical_rate_function,
    certify_rate_function, check_upper_bound_property, gmet_table, markov_as_fsm, metric_eval,
    pem_table, rank, redundancy, theorem1_check, u1_table, u2_table, unrank,
)
from univdec._util import to_fraction
from univdec.channels import DMC
from univdec.metrics import FiniteStateMetric, MarkovWindowMetric
from univdec.simulator import sandwich_check

SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])

weights = st.lists(st.integers(1, 9), min_size=2, max_size=2)


@st.composite
def instance(draw, max_n=3):
    n = draw(st.integers(1, max_n))
    w = draw(weights)
    prior = IIDPrior([Fraction(v, sum(w)) for v in w], n)
    N = 2 ** n
    levels = draw(st.integers(1, 5))
    vals = draw(st.lists(st.integers(0, levels - 1), min_size=N * N, max_size=N * N))
    return prior, TableMetric(np.array(vals).reshape(N, N), 2, 2)


@st.composite
def family(draw, max_n=3, max_size=4):
    prior, first = draw(instance(max_n))
    N = 2 ** prior.n
    members = [first]
    for _ in range(draw(st.integers(0, max_size - 1))):
        vals = draw(st.lists(st.integers(0, 3), min_size=N * N, max_size=N * N))
        members.append(TableMetric(np.array(vals).reshape(N, N), 2, 2))
    return prior, MetricFamily(tuple(members))


@st.composite
def dmc(draw):
    rows = []
    for _ in range(2):
        a, b = draw(weights)
        rows.append([Fraction(a, a + b), Fraction(b, a + b)])
    return DMC(rows)


@SETTINGS
@given(instance())
def test_pem_bounds_and_order(inst):
    prior, m = inst
    t = pem_table(prior, m, 2)
    N = 2 ** prior.n
    vals = m.values
    for j in range(N):
        for a in range(N):
            assert prior.mass(unrank(a, 2, prior.n)) <= t[a, j] <= 1
            for b in range(N):
                if vals[a, j] <= vals[b, j]:
                    assert t[a, j] >= t[b, j]


@SETTINGS
@given(instance())
def test_pem_float_mode_agrees(inst):
    prior, m = inst
    exact = pem_table(prior, m, 2)
    loose = pem_table(IIDPrior([float(v) for v in prior.probs], prior.n, exact=False),
                      TableMetric(m.values.astype(float), 2, 2), 2)
    np.testing.assert_allclose(loose.log2, exact.log2_values(), rtol=1e-10, atol=1e-12)


@SETTINGS
@given(family())
def test_theorem1_holds(fam_inst):
    prior, fam = fam_inst
    rep = theorem1_check(prior, fam, y_size=2)
    assert rep.worst <= 1


@SETTINGS
@given(family())
def test_redundancy_at_least_one_and_family_order_irrelevant(fam_inst):
    prior, fam = fam_inst
    K = redundancy(prior, fam, 2).K
    assert K >= 1
    flipped = MetricFamily(tuple(reversed(fam.members)) + (fam[0],))
    assert redundancy(prior, flipped, 2).K == K
    a, b = gmet_table(prior, fam, 2), gmet_table(prior, flipped, 2)
    assert (a.probs.num == b.probs.num).all()


@SETTINGS
@given(family())
def test_u2_u1_gmet_chain(fam_inst):
    prior, fam = fam_inst
    u1, u2, g = u1_table(prior, fam, 2), u2_table(prior, fam, 2), gmet_table(prior, fam, 2)
    N = 2 ** prior.n
    for i in range(N):
        q = prior.mass(unrank(i, 2, prior.n))
        for j in range(N):
            assert q <= u2[i, j] <= u1[i, j] <= g[i, j]


@SETTINGS
@given(instance(), dmc(), st.sampled_from([2, 3, 4, 8]))
def test_sandwich_ratio(inst, channel, M):
    prior, m = inst
    rep = sandwich_check(prior, channel, m, None, size=M)
    assert Fraction(1, 2) <= rep.worst <= 1


@SETTINGS
@given(st.integers(1, 3), weights, st.data())
def test_omega_is_rate_function_and_dominates(n, w, data):
    prior = IIDPrior([Fraction(v, sum(w)) for v in w], n)
    exps = data.draw(st.lists(st.integers(-2, 4), min_size=2 ** n, max_size=2 ** n))
    R = RateFunction.from_exponents(n, exps)
    om = canonical_rate_function(prior, R)
    assert certify_rate_function(prior, om).passed
    assert list(canonical_rate_function(prior, om).scale) == list(om.scale)
    if certify_rate_function(prior, R).passed:
        check_upper_bound_property(prior, R)


@SETTINGS
@given(st.integers(1, 5), st.integers(2, 3), st.data())
def test_rank_unrank(n, q, data):
    i = data.draw(st.integers(0, q ** n - 1))
    assert rank(unrank(i, q, n), q) == i


@SETTINGS
@given(st.fractions(min_value=-10, max_value=10, max_denominator=1000))
def test_fraction_text_roundtrip(v):
    assert to_fraction(str(v)) == v


@SETTINGS
@given(st.integers(0, 2), st.integers(0, 2 ** 16), st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)),
                                                                min_size=1, max_size=6))
def test_markov_fsm_image(order, seed, pairs):
    rng = np.random.default_rng(seed)
    cache = {}

    def score(window):
        return cache.setdefault(window, int(rng.integers(-2, 3)))

    markov = MarkovWindowMetric(order, score, 2, 2)
    x = [p[0] for p in pairs]
    y = [p[1] for p in pairs]
    assert metric_eval(markov, x, y) == metric_eval(markov_as_fsm(markov), x, y) == markov.evaluate_direct(x, y)


@SETTINGS
@given(st.integers(0, 2 ** 16), st.permutations([0, 1, 2]))
def test_fsm_relabel_invariant(seed, perm):
    rng = np.random.default_rng(seed)
    m = FiniteStateMetric(rng.integers(3, size=(3, 2, 2)), rng.integers(-2, 3, size=(3, 2, 2)))
    r = m.relabel(perm)
    x, y = rng.integers(2, size=5), rng.integers(2, size=5)
    assert metric_eval(m, x, y) == metric_eval(r, x, y)


@settings(max_examples=10, deadline=None)
@given(instance(max_n=2), dmc(), st.integers(0, 2 ** 32 - 1))
def test_mc_reproducible_and_partition_free(inst, channel, seed):
    prior, m = inst
    a = avg_error_mc(prior, channel, m, Fraction(1, prior.n), 700, seed, chunk=128)
    b = avg_error_mc(prior, channel, m, Fraction(1, prior.n), 700, seed, jobs=3, chunk=128)
    assert a.errors == b.errors
