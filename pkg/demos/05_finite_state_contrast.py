"""Finite-state metric families over a Gilbert-Elliott channel.

With a handful of two-state machines the GMET decoder stays within 2 K_n
of the best member.  With one n-state machine per (x, y) pair, every pair
has a member that ranks it alone at the top, the GMET value collapses to
Q(x) everywhere, and the decoder sees nothing but ties.
"""
from univdec.cli import DEMO_FSC_CONFIG, demo_fsc
from univdec.config import parse_config

results, checks = demo_fsc(parse_config(DEMO_FSC_CONFIG), jobs=2)
print()
for name, rep in checks:
    print(f"{'PASS' if rep.passed else 'FAIL'}  {name}")
