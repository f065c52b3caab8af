import math
from fractions import Fraction

import numpy as np
import pytest

from univdec import (
    IIDPrior, RateFunction, VerificationError, asymptotic_condition_check, canonical_rate_function,
    certify_rate_function, certify_tightness, check_order_preservation, check_upper_bound_property,
    expectation_bound, likelihood_ratio_rate_function, omega, pem_table, uniform_prior, unrank,
)
from univdec.metrics import strict_order_metric
from univdec.priors import ExplicitTable, prior_chi
from univdec.ratefn import random_rate_function


def rank_rate(n):
    """R = sequence rank (a strictly increasing function of the rank)."""
    return RateFunction(n, values=list(range(2 ** n)))


def test_omega_constant_is_zero():
    p = IIDPrior(["1/3", "2/3"], 2)
    R = RateFunction.from_exponents(2, [1, 1, 1, 1])
    assert all(omega(p, R, unrank(i, 2, 2)) == 0 for i in range(4))


def test_omega_rank_values():
    p = uniform_prior(2, 2)
    R = RateFunction.from_exponents(2, [0, 1, 2, 3])
    for i in range(4):
        k = 4 - i  # sequences at or above rank i
        assert omega(p, R, unrank(i, 2, 2)) == pytest.approx(-0.5 * math.log2(k / 4))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_omega_idempotent_and_certified(n):
    rng = np.random.default_rng(n)
    p = IIDPrior(["1/5", "4/5"], n)
    for _ in range(10):
        om = canonical_rate_function(p, random_rate_function(rng, n, 2))
        again = canonical_rate_function(p, om)
        assert list(again.scale) == list(om.scale)
        assert certify_rate_function(p, om).passed


def test_constant_positive_fails_with_witness():
    p = uniform_prior(2, 2)
    cert = certify_rate_function(p, RateFunction.from_exponents(2, [1, 1, 1, 1]))
    assert not cert.passed and cert.witness == pytest.approx(0.5)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_likelihood_ratio_certifies(n):
    Q = IIDPrior(["1/3", "2/3"], n)
    P = IIDPrior(["3/4", "1/4"], n)
    R = likelihood_ratio_rate_function(Q, P)
    assert certify_rate_function(Q, R).passed
    rep = asymptotic_condition_check(Q, R)
    assert rep.details["moment"] == 1  # E_Q[P/Q] = 1 exactly


def test_tightness_examples():
    p = uniform_prior(2, 2)
    om = canonical_rate_function(p, random_rate_function(np.random.default_rng(1), 2, 2))
    assert certify_tightness(p, om).slack == 0
    zero = RateFunction.from_exponents(2, [0, 0, 0, 0])
    assert certify_tightness(p, zero).slack == 0
    t = pem_table(p, strict_order_metric(2, 2, 2), 2)
    canon = RateFunction(2, scale=[1 / t[i, 0] for i in range(4)])
    cert = certify_tightness(p, canon)
    assert cert.passed and cert.slack == 0


def test_order_preservation_random():
    rng = np.random.default_rng(4)
    for n in (1, 2, 3):
        p = uniform_prior(2, n)
        for _ in range(10):
            check_order_preservation(p, random_rate_function(rng, n, 2))
    check_order_preservation(p, RateFunction.from_exponents(3, [2] * 8))


def test_order_preservation_skips_zero_mass():
    p = ExplicitTable({(0,): Fraction(1)}, 2, 1)
    R = RateFunction.from_exponents(1, [0, 1])
    check_order_preservation(p, R)


def test_upper_bound_property_examples():
    p = IIDPrior(["1/3", "2/3"], 2)
    om = canonical_rate_function(p, RateFunction.from_exponents(2, [0, 3, 1, 2]))
    rep = check_upper_bound_property(p, om)
    assert rep.worst == 1
    R = likelihood_ratio_rate_function(p, p)
    assert all(v == 0 for v in R.values())
    check_upper_bound_property(p, R)


def test_upper_bound_property_rejects_non_rate_function():
    with pytest.raises(ValueError):
        check_upper_bound_property(uniform_prior(2, 1), RateFunction.from_exponents(1, [1, 1]))


def test_expectation_bound_harmonic():
    p = uniform_prior(2, 2)
    t = pem_table(p, strict_order_metric(2, 2, 2), 2)
    R = RateFunction(2, scale=[1 / t[i, 0] for i in range(4)])
    rep = expectation_bound(p, R, 2)
    assert rep.worst == Fraction(25, 12)
    assert rep.details["bound"] == pytest.approx(1 + 2 * math.log(2))
    zero = RateFunction.from_exponents(2, [0, 0, 0, 0])
    assert expectation_bound(p, zero, 0).worst == 1


def test_expectation_bound_with_chi():
    rng = np.random.default_rng(12)
    for n in (1, 2, 3):
        p = IIDPrior(["1/4", "3/4"], n)
        for _ in range(10):
            om = canonical_rate_function(p, random_rate_function(rng, n, 2))
            expectation_bound(p, om, prior_chi(p))


def test_expectation_bound_precondition():
    p = uniform_prior(2, 2)
    om = canonical_rate_function(p, RateFunction.from_exponents(2, [0, 1, 2, 3]))
    with pytest.raises(ValueError):
        expectation_bound(p, om, 1)


def test_asymptotic_condition_on_omega():
    p = IIDPrior(["1/4", "3/4"], 2)
    om = canonical_rate_function(p, RateFunction.from_exponents(2, [0, 1, 2, 3]))
    rep = asymptotic_condition_check(p, om)
    assert rep.details["lam"] == 0
    assert rep.details["chi"] <= prior_chi(p) / 2 + 1e-12


def test_asymptotic_condition_constant():
    p = uniform_prior(2, 2)
    rep = asymptotic_condition_check(p, RateFunction.from_exponents(2, [1, 1, 1, 1]))
    assert rep.details["moment"] == 2 and rep.details["lam"] == pytest.approx(0.5)


def test_float_rate_function_certificate():
    p = uniform_prior(2, 2)
    R = RateFunction(2, values=[0.0, 0.1, 0.2, 0.3])
    assert certify_rate_function(p, R).passed
    assert not certify_rate_function(p, RateFunction(2, values=[0.6] * 4)).passed


def test_order_preservation_raises_on_corruption(monkeypatch):
    import univdec.ratefn as rf
    p = uniform_prior(2, 1)
    R = RateFunction.from_exponents(1, [0, 1])
    real = rf.survival

    def flipped(prior, R, cap=None):
        col = real(prior, R, cap)
        return type(col)(num=col.num[::-1].copy(), den=col.den)

    monkeypatch.setattr(rf, "survival", flipped)
    with pytest.raises(VerificationError):
        check_order_preservation(p, R)
