"""A_p ratios of piecewise power-law weights over finite interval sweeps."""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass, field

from .errors import DegenerateInterval, InvalidExponent
from .power_arcs import Interval, PiecewisePowerFn, PowerArc, as_point, integrate_power
from .weights import WeightSequence, fmt


@dataclass(frozen=True)
class SweepSpec:
    """Intervals of length ``2**-j * |window|`` for ``j_min <= j <= j_max``,
    centers stepped by ``step`` times the length, all inside the window."""

    window: Interval = field(default_factory=lambda: Interval(0, 1))
    j_min: int = 0
    j_max: int = 12
    step: float = 0.5

    def __post_init__(self):
        if not isinstance(self.window, Interval):
            object.__setattr__(self, "window", Interval(*self.window))
        if self.j_min > self.j_max:
            raise ValueError("j_min must not exceed j_max")
        if not 0 < self.step <= 1:
            raise ValueError("step must lie in (0, 1]")

    def scale_intervals(self, j: int) -> list:
        width = self.window.hi - self.window.lo
        length = width / 2**j
        stride = length * as_point(self.step)
        out = []
        lo = self.window.lo
        while lo + length <= self.window.hi:
            out.append(Interval(lo, lo + length))
            lo += stride
        return out

    def intervals(self) -> list:
        """``(j, Interval)`` pairs sorted by scale, then center."""
        return [(j, iv) for j in range(self.j_min, self.j_max + 1)
                for iv in self.scale_intervals(j)]


def dyadic_sweep(window: Interval, depth: int) -> SweepSpec:
    """Non-overlapping dyadic intervals of depth 0..depth."""
    return SweepSpec(window=window, j_min=0, j_max=depth, step=1.0)


def ap_ratio(f: PiecewisePowerFn, interval: Interval, p: float) -> float:
    """``(avg f) * (avg f**(1/(1-p)))**(p-1)`` on the interval; ``inf`` if divergent."""
    if not p > 1:
        raise InvalidExponent(f"A_p ratio needs p > 1, got {p}")
    if not interval.lo < interval.hi:
        raise DegenerateInterval("A_p ratio needs a nondegenerate interval")
    length = interval.length
    dual = integrate_power(f, 1.0 / (1.0 - p), interval)
    if math.isinf(dual):
        return math.inf
    mean = integrate_power(f, 1.0, interval) / length
    return mean * (dual / length) ** (p - 1.0)


@dataclass
class ApReport:
    p: float
    rows: list  # (center, length, ratio)
    intervals: list
    stage_sups: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    epsilons: list = field(default_factory=list)
    c_emp: float | None = None

    @property
    def sup(self) -> float:
        return max(r[2] for r in self.rows)

    @property
    def argmax(self) -> Interval:
        i = max(range(len(self.rows)), key=lambda i: self.rows[i][2])
        return self.intervals[i]

    @property
    def has_infinite(self) -> bool:
        return any(math.isinf(r[2]) for r in self.rows)

    def rows_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["center", "length", "ratio"])
        for c, ln, r in self.rows:
            w.writerow([fmt(c), fmt(ln), fmt(r)])
        return buf.getvalue()

    def audit_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "S_k", "eps_k", "flag"])
        for k, (s, flag) in enumerate(zip(self.stage_sups, self.flags)):
            eps = self.epsilons[k - 1] if k > 0 else 0.0
            w.writerow([k, fmt(s), fmt(eps), "true" if flag else "false"])
        return buf.getvalue()

    def growth_bound(self) -> float:
        """``C_emp * prod (1 + eps_k)**p`` over the audited stages."""
        prod = math.prod(1.0 + e for e in self.epsilons)
        return self.c_emp * prod**self.p


def ap_scan(f: PiecewisePowerFn, p: float, sweep: SweepSpec) -> ApReport:
    ivs = [iv for _, iv in sweep.intervals()]
    rows = [(float(iv.center), iv.length, ap_ratio(f, iv, p)) for iv in ivs]
    return ApReport(p=p, rows=rows, intervals=ivs)


AUDIT_REL_TOL = 1e-6
AUDIT_C_LEVELS = 10
AUDIT_C_FACTOR = 1.05


def stage_growth_audit(seq: WeightSequence, p: float, sweep: SweepSpec) -> ApReport:
    """Sweep sup ``S_k`` of the A_p ratio at every level plus the growth flags

        S_k <= max((1 + eps_k)**p * S_{k-1}, C_emp) * (1 + 1e-6),

    ``C_emp`` being 1.05 times the largest ``S`` over the first ten levels.
    Only sweep intervals meeting the new bump are recomputed per level.
    """
    if not p > 1 + seq.params.alpha:
        raise InvalidExponent(f"growth audit needs p > 1 + alpha, got p = {p}")
    ivs = [iv for _, iv in sweep.intervals()]
    # intervals grouped by scale for fast overlap lookup
    by_len: dict = {}
    for i, iv in enumerate(ivs):
        by_len.setdefault(iv.hi - iv.lo, []).append(i)
    groups = [(length, idx, [ivs[i].lo for i in idx]) for length, idx in by_len.items()]

    ratios = [ap_ratio(seq.levels[0], iv, p) for iv in ivs]
    sups = [max(ratios)]
    for st in seq.stages:
        w = seq.levels[st.k]
        bump = st.I
        for length, idx, los in groups:
            a = bisect.bisect_left(los, bump.lo - length)
            b = bisect.bisect_right(los, bump.hi)
            for t in range(a, b):
                i = idx[t]
                if ivs[i].meets(bump):
                    ratios[i] = ap_ratio(w, ivs[i], p)
        sups.append(max(ratios))

    eps = seq.epsilons()
    c_emp = max(sups[:AUDIT_C_LEVELS]) * AUDIT_C_FACTOR
    flags = [True]
    for k in range(1, len(sups)):
        allowed = max((1.0 + eps[k - 1]) ** p * sups[k - 1], c_emp)
        flags.append(sups[k] <= allowed * (1.0 + AUDIT_REL_TOL))
    rows = [(float(iv.center), iv.length, r) for iv, r in zip(ivs, ratios)]
    return ApReport(p=p, rows=rows, intervals=ivs, stage_sups=sups, flags=flags,
                    epsilons=eps, c_emp=c_emp)


def xalpha_bound(alpha: float, p: float) -> float:
    """Case bound ``max(2**alpha, 2**p (2/(alpha+1)) (2/(alpha/(1-p)+1))**(p-1))``."""
    return max(2.0**alpha,
               2.0**p * (2.0 / (alpha + 1.0)) * (2.0 / (alpha / (1.0 - p) + 1.0)) ** (p - 1.0))


def xalpha_ap_constant(alpha: float, p: float, sweep: SweepSpec) -> tuple:
    """Sweep sup of the A_p ratio of ``|x|**alpha`` and the analytic bound."""
    if not p > 1 + alpha:
        raise InvalidExponent(f"|x|**alpha is A_p only for p > 1 + alpha, got p = {p}")
    f = PiecewisePowerFn.single(PowerArc(0, 1.0, alpha))
    return ap_scan(f, p, sweep).sup, xalpha_bound(alpha, p)


def increase_certificates(seq: WeightSequence, p: float) -> list:
    """Per stage, whether the bump mass (for ``w`` and ``w**(1/(1-p))``) is at
    most ``eps_k`` times the mass of ``w_{k-1}`` on each side annulus."""
    s = 1.0 / (1.0 - p)
    out = []
    for st in seq.stages:
        new, old = seq.levels[st.k], seq.levels[st.k - 1]
        row = {"k": st.k}
        for name, expo in (("mass", 1.0), ("dual", s)):
            inside = integrate_power(new, expo, st.I)
            for side, ann in (("+", st.J_plus), ("-", st.J_minus)):
                row[f"{name}{side}"] = inside <= st.epsilon * integrate_power(old, expo, ann)
        out.append(row)
    return out


def doubling_ratio(f: PiecewisePowerFn, interval: Interval) -> float:
    """``mu(2I) / mu(I)`` for ``mu = f dx``."""
    return integrate_power(f, 1.0, interval.scaled(2)) / integrate_power(f, 1.0, interval)


def doubling_sup(f: PiecewisePowerFn, sweep: SweepSpec) -> float:
    return max(doubling_ratio(f, iv) for _, iv in sweep.intervals())
