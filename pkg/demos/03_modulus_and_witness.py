"""
Modulus of interval curves
==========================

Single curves have a closed form; families go through a convex solver.  Below
the threshold, curves through a zero are null, and a witness shows it.
"""

from pweak import (
    ConstructionParams,
    CurveFamily,
    Interval,
    MeasureSpec,
    PiecewisePowerFn,
    PowerArc,
    Witness,
    build,
    log_rbar,
    modulus_family_grid,
    modulus_single,
    verify_null_witness,
)
from pweak.muckenhoupt import dyadic_sweep

mu = MeasureSpec(PiecewisePowerFn.single(PowerArc(0, 1.0, 0.5)))
iv = Interval(-1, 1)
print("closed form:", modulus_single(mu, iv, 2.0))
for m in (256, 1024, 2048):
    res = modulus_family_grid(mu, CurveFamily((iv,)), 2.0, cells=m)
    print(f"  grid m={m}: {res.value:.6f} (gap {res.gap:.1e})")

# A family of three overlapping curves.
fam = CurveFamily((Interval(-1, 0.25), Interval(-0.5, 1), Interval(0, 0.75)))
res = modulus_family_grid(mu, fam, 3.0, cells=1024)
print("family modulus at p=3:", res.value, " converged:", res.converged)

# The exponent test at the zero: |x|^(1/2) kills curves through 0 for p <= 1.5.
for p in (1.2, 1.5, 1.6, 2.0):
    print(f"p={p}: Mod of [-1,1] =", modulus_single(mu, iv, p))

# On the constructed weight, w^-1 has finite 1.5-energy but infinite integral
# along every dyadic curve meeting a zero.
seq = build(ConstructionParams(alpha=1.0, max_stages=60))
w = MeasureSpec(seq.final)
meeting = CurveFamily(tuple(c for _, c in dyadic_sweep(Interval(0, 1), 6).intervals()
                            if any(c.lo <= q <= c.hi for q in seq.centers)))
check = verify_null_witness(w, Witness(seq.final, -1.0, Interval(0, 1)), meeting, 1.5)
print(f"{len(meeting)} curves null at p=1.5:", check.ok, " energy", round(check.mass, 6))

# At p = 2 the plain witness has infinite energy; a logarithmic damping fixes it.
damped = Witness(seq.final, -1.0, Interval(0, 1), log_power=1.0, log_r=log_rbar(1.0))
print("null at p=2 with the damped witness:", verify_null_witness(w, damped, meeting, 2.0).ok)
