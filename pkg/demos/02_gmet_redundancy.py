"""GMET over a small family of BSC likelihood metrics, and how K_n behaves with n.

The GMET picks, for each (x, y), the family member with the smallest
pairwise error.  Its price is K_n = max_y E_Q[1 / GMET(X, y)]; the error of
the GMET decoder is at most K_n times the error of any member, and
(1/n) log2 K_n is the per-symbol loss in exponent.
"""
from fractions import Fraction

from univdec import (
    build_dmc_family, bsc, family_end_to_end_check, gmet_table, redundancy, theorem1_check,
    uniform_prior,
)

grid = [[[1 - d, d], [d, 1 - d]] for d in (Fraction(1, 20), Fraction(1, 5), Fraction(7, 10))]
family = build_dmc_family(grid, labels=("d=0.05", "d=0.2", "d=0.7"))

print(" n        K_n   (1/n)log2 K_n")
for n in range(1, 8):
    rep = redundancy(uniform_prior(2, n), family)
    print(f"{n:2d} {float(rep.K):10.4f}   {rep.slack:.4f}")

n = 4
prior = uniform_prior(2, n)
g = gmet_table(prior, family)
used = {family.labels[i] for i in set(g.argmin.ravel().tolist())}
print(f"\nat n={n} the minimising member varies with (x, y); members used: {sorted(used)}")

rep = theorem1_check(prior, family, y_size=2)
print(f"pe_U <= K_n pem_theta everywhere; largest ratio {float(rep.worst):.4f}")

channel = bsc(Fraction(3, 20))
end = family_end_to_end_check(prior, channel, family, Fraction(1, 2))
print("average error at R = 1/2 over a BSC(0.15):")
for label, pe in zip(family.labels, end.details["P_members"]):
    print(f"  {label:8s} {float(pe):.5f}")
print(f"  GMET     {float(end.details['P_gmet']):.5f}  (bound 2 K_n min = "
      f"{float(2 * end.details['K'] * min(end.details['P_members'])):.5f})")
