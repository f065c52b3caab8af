"""Average error of random codes: the exact closed form, the union-clip
bound, and a Monte Carlo check.

With M codewords drawn iid from the prior, P_e = E[1 - (1 - pem)^(M-1)].
That sits between half and all of E[min(1, M pem)].
"""
from fractions import Fraction

from univdec import avg_error_exact, avg_error_mc, bsc, hamming_metric, union_clip_bound, uniform_prior

prior = uniform_prior(2, 6)
channel = bsc(Fraction(1, 10))
metric = hamming_metric(2)

print("  R     M   P_e exact   union-clip   ratio    P_e MC (10^4 trials)")
for R in (Fraction(1, 6), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)):
    pe = avg_error_exact(prior, channel, metric, R)
    ub = union_clip_bound(prior, channel, metric, R)
    mc = avg_error_mc(prior, channel, metric, R, 10_000, seed=11, jobs=2)
    M = round(2 ** (6 * R))
    print(f"{str(R):>4} {M:4d}   {float(pe):.5f}     {float(ub):.5f}    {float(pe / ub):.4f}   "
          f"{mc.value:.4f} +/- {mc.ci_halfwidth:.4f}")
