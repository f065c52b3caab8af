"""Rate functions and their canonical version Omega_R.

R is a rate function when Q(R(X) >= t) <= 2^{-n t} for all t.  Any R can be
rewritten as Omega_R(x) = -(1/n) log2 Q(R(X) >= R(x)), which keeps the order
of R, is itself a rate function, and dominates every rate function with the
same order.
"""
from fractions import Fraction

import numpy as np

from univdec import (
    IIDPrior, RateFunction, asymptotic_condition_check, canonical_rate_function, certify_rate_function,
    check_upper_bound_property, expectation_bound, likelihood_ratio_rate_function,
)
from univdec.priors import prior_chi

n = 3
prior = IIDPrior([Fraction(1, 4), Fraction(3, 4)], n)
rng = np.random.default_rng(2)
R = RateFunction.from_exponents(n, rng.integers(-1, 4, size=2 ** n))

print("n R(x):      ", [int(np.log2(float(s))) if s else "-inf" for s in R.scale])
print("R certified: ", certify_rate_function(prior, R).passed)
om = canonical_rate_function(prior, R)
print("n Omega_R(x):", [round(float(np.log2(float(s))), 3) for s in om.scale])
print("Omega_R certified:", certify_rate_function(prior, om).passed)
check_upper_bound_property(prior, RateFunction(n, scale=[s / 2 for s in om.scale]))
print("a shrunk Omega_R stays below Omega_R: ok")

chi = prior_chi(prior)
rep = expectation_bound(prior, om, chi)
print(f"E[2^(n Omega)] = {float(rep.worst):.4f} <= 1 + ln2 * chi = {rep.details['bound']:.4f}")

P = IIDPrior([Fraction(2, 3), Fraction(1, 3)], n)
lr = likelihood_ratio_rate_function(prior, P)
cond = asymptotic_condition_check(prior, lr)
print(f"likelihood ratio log(P/Q)/n: certified {certify_rate_function(prior, lr).passed}, "
      f"E_Q[P/Q] = {cond.details['moment']}")
