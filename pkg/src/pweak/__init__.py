"""Numerics for power-law weights on the line: A_p ratios, integrability,
p-modulus of interval curves and p-weak gradients."""

from .errors import (
    DegenerateInterval,
    EmptyFamily,
    InvalidExponent,
    NotConverged,
    NotDifferentiable,
    PreconditionViolated,
    PweakError,
    UnsupportedExponentPair,
    ZeroAtCenter,
)
from .modulus import (
    CurveFamily,
    MeasureSpec,
    ModulusResult,
    Witness,
    modulus_family_grid,
    modulus_single,
    verify_null_witness,
    witness_mass,
)
from .muckenhoupt import (
    ApReport,
    SweepSpec,
    ap_ratio,
    ap_scan,
    doubling_ratio,
    doubling_sup,
    dyadic_sweep,
    increase_certificates,
    stage_growth_audit,
    xalpha_ap_constant,
)
from .power_arcs import (
    Interval,
    PiecewisePowerFn,
    PowerArc,
    crossings,
    integrate_log_corrected,
    integrate_log_power,
    integrate_power,
    log_rbar,
    pw_eval,
    pw_extrema,
    pw_min,
)
from .rationals import enumerate_rationals
from .weak_gradient import (
    LipschitzSpec,
    NpReport,
    classify_point,
    np_complement,
    weak_gradient_at,
    weak_gradient_report,
)
from .weights import (
    ConstructionParams,
    Stage,
    WeightSequence,
    build,
    mc_integral_nd,
    product_weight_at,
    stage_increments,
    weight_at,
)

__version__ = "0.1.0"
