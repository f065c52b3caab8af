"""Pairwise errors, the canonical metric, and the harmonic-number redundancy.

A decoding metric only matters through its ordering of candidate codewords
for each output y.  The pairwise error pem(x, y) is the chance that one
random competitor ties or beats the transmitted x; -(1/n) log2 pem is the
canonical form of the metric.
"""
from fractions import Fraction

from univdec import (
    canonical_metric, hamming_metric, normality_statistic, pairwise_error_exact, pairwise_error_mc,
    uniform_prior,
)
from univdec.metrics import strict_order_metric

prior = uniform_prior(2, 2)
ham = hamming_metric(2)

exact = pairwise_error_exact(prior, ham, (0, 0), (0, 0))
mc = pairwise_error_mc(prior, ham, (0, 0), (0, 0), trials=100_000, seed=1)
print("pem for x = y = 00 under minus-Hamming")
print(f"  exact       {exact.value}")
print(f"  Monte Carlo {mc.value:.4f} +/- {mc.ci_halfwidth:.4f}")
print(f"  canonical   {canonical_metric(prior, ham, (0, 0), (0, 0))}")

# A metric that strictly orders all 2^n sequences gives pem values k / 2^n,
# so E[1 / pem] is a harmonic number.
print("\nE_Q[1/pem] for a strict total order, uniform prior")
for n in range(1, 5):
    stat = normality_statistic(uniform_prior(2, n), strict_order_metric(2, 2, n), (0,) * n)
    harmonic = sum(Fraction(1, k) for k in range(1, 2 ** n + 1))
    print(f"  n={n}: {str(stat):>16}  (H_{2 ** n} = {harmonic})")
