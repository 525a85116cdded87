"""
The p-weak gradient depends on p
================================

For f(x) = x the weak gradient is 1 on N_p and 0 off it; the complement of
N_p is the set of zeros whose local exponent is at least p - 1.
"""

from pweak import (
    ConstructionParams,
    Interval,
    LipschitzSpec,
    MeasureSpec,
    build,
    np_complement,
    weak_gradient_at,
)
from pweak.weak_gradient import report_csv, weak_gradient_report

seq = build(ConstructionParams(alpha=1.0, max_stages=12))
mu = MeasureSpec(seq.final)
f = LipschitzSpec.linear(1.0)

for p in (1.5, 2.0, 2.5):
    rep = np_complement(mu, p, Interval(0, 1))
    print(f"p={p}: {len(rep.points)} excluded points")

q = seq.centers[0]
print("gradient at", q, "for p = 1.5, 3:", weak_gradient_at(mu, 1.5, f, q), weak_gradient_at(mu, 3.0, f, q))

# Sample a grid plus the zeros themselves; the grid alone would miss them.
rows = weak_gradient_report(mu, 1.5, f, Interval(0, 1), 9, points=seq.centers[:4])
print(report_csv(rows))

# Atoms are invisible to the weak gradient.
with_atom = mu.with_atoms([(0.9, 3.0)])
print("at an atom:", weak_gradient_at(with_atom, 3.0, f, 0.9))
