"""
Building the weight
===================

A weight on (0, 1) that vanishes on a dense set of rationals, built one bump
at a time, and the integrability of its negative powers.
"""

import math
from fractions import Fraction

from pweak import ConstructionParams, Interval, build, integrate_power, stage_increments
from pweak.muckenhoupt import dyadic_sweep

# Start from the constant 1 and carve |x - q|-shaped notches at the first
# 40 rationals of the Calkin-Wilf order.
seq = build(ConstructionParams(alpha=1.0, window=Interval(0, 1), max_stages=40))
print(seq.stage_table_csv().splitlines()[:6])

# Each notch is far narrower than the last; by stage 40 the half-width is
# below 1e-20, yet the breakpoints stay exact because abscissae are Fractions.
print("narrowest bump:", min(st.r for st in seq.stages))
print("zeros:", [str(z) for z in sorted(seq.final.zeros())[:8]], "...")

# w**-s is integrable for s < 1/alpha and not for s = 1/alpha.
for s in (0.5, 0.9, 1.0):
    print(f"int w^-{s} over (0,1) =", integrate_power(seq.final, -s, Interval(0, 1)))

# Each stage adds at most a multiple of its budget epsilon_k = 2^-k.
inc = stage_increments(seq, -0.5)
for k in (1, 5, 10, 20, 40):
    print(f"stage {k:2d}: increment {inc[k - 1]:.3e}, ratio to eps {inc[k - 1] / 2.0**-k:.3e}")

# Any dyadic interval that touches a zero carries an infinite integral of w^-1.
qs = seq.centers
rows = [(iv, integrate_power(seq.final, -1.0, iv)) for _, iv in dyadic_sweep(Interval(0, 1), 5).intervals()]
touching = [v for iv, v in rows if any(iv.lo <= q <= iv.hi for q in qs)]
print(f"{len(touching)} of {len(rows)} dyadic intervals meet a zero; all infinite:",
      all(math.isinf(v) for v in touching))
print("a clean one:", Fraction(31, 32), integrate_power(seq.final, -1.0, Interval(Fraction(31, 32), 1)))
