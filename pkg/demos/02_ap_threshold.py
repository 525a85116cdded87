"""
The A_p threshold
=================

The same weight is an A_p weight exactly when p > 1 + alpha.
"""

from pweak import (
    ConstructionParams,
    Interval,
    PiecewisePowerFn,
    PowerArc,
    ap_ratio,
    ap_scan,
    build,
    stage_growth_audit,
)
from pweak.muckenhoupt import SweepSpec, dyadic_sweep, xalpha_ap_constant

# The model singularity first: |x| on [-1, 1].
absx = PiecewisePowerFn.single(PowerArc(0, 1.0, 1.0))
for p in (1.5, 2.0, 2.5, 3.0):
    print(f"A_{p} ratio of |x| on [-1,1]:", ap_ratio(absx, Interval(-1, 1), p))

sup, bound = xalpha_ap_constant(1.0, 3.0, SweepSpec(Interval(0, 4), 0, 10))
print(f"|x| sweep sup at p=3: {sup:.4f} (analytic bound {bound:.1f})")

# Now the constructed weight.  Below the threshold the scan reports inf;
# above it the sup stays small however many bumps there are.
seq = build(ConstructionParams(alpha=1.0, max_stages=100))
sweep = SweepSpec(Interval(0, 1), 0, 10)
for p in (1.5, 2.0, 2.5, 3.0, 5.0):
    rep = ap_scan(seq.final, p, sweep)
    print(f"p={p}: sup={rep.sup:.4f}  worst interval {rep.argmax}")

# The audit tracks the sweep sup after every stage.
rep = stage_growth_audit(seq, 3.0, dyadic_sweep(Interval(0, 1), 10))
print("S_k for k = 0..10:", [round(s, 4) for s in rep.stage_sups[:11]])
print("all growth flags:", all(rep.flags), " C_emp:", round(rep.c_emp, 4))
