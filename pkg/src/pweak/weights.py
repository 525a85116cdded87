"""Stage-by-stage construction of the weight and its product extension.

Level 0 is the constant 1.  Stage ``k`` (``k = 1..K``) places a bump of shape
``|x|**alpha`` at the k-th enumerated rational ``q_k``:

    w_k = min(w_{k-1}, g_k)  on  [q_k - r_k, q_k + r_k],   w_k = w_{k-1} elsewhere,
    g_k(x) = 2 L_k |(x - q_k) / r_k| ** alpha,   L_k = w_{k-1}(q_k).

so ``w_K`` vanishes exactly at ``q_1, ..., q_K``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ZeroAtCenter
from .power_arcs import (
    Interval,
    PiecewisePowerFn,
    PowerArc,
    as_point,
    integrate_log_power,
    integrate_power,
    log_rbar,
    pw_eval,
    pw_extrema,
    pw_min,
)
from .rationals import enumerate_rationals

EPSILON_RULES: dict = {
    "dyadic": lambda k: 2.0**-k,
    "inverse-square": lambda k: 1.0 / (k * k),
}

STAGE_CSV_HEADER = ("k", "q_num", "q_den", "epsilon", "L", "R", "r")


def fmt(x: float) -> str:
    """17 significant digits, ``inf`` for infinity."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def shape_constant(alpha: float) -> float:
    """``max(2/alpha, 1)``: sup over p > 1 + alpha of (p - alpha + 1)/(p - 1)."""
    return max(2.0 / alpha, 1.0)


@dataclass(frozen=True)
class ConstructionParams:
    alpha: float
    window: Interval = field(default_factory=lambda: Interval(0, 1))
    max_stages: int = 50
    epsilon_rule: str = "dyadic"

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not isinstance(self.window, Interval):
            object.__setattr__(self, "window", Interval(*self.window))
        if not self.window.lo < self.window.hi:
            raise ValueError("window must be nondegenerate")
        if int(self.max_stages) != self.max_stages or self.max_stages < 0:
            raise ValueError("max_stages must be a nonnegative integer")
        if self.epsilon_rule not in EPSILON_RULES:
            raise ValueError(f"unknown epsilon rule {self.epsilon_rule!r}")

    @property
    def beta(self) -> float:
        return 1.0 / self.alpha

    def epsilon(self, k: int) -> float:
        return EPSILON_RULES[self.epsilon_rule](k)


@dataclass(frozen=True)
class Stage:
    """One bump: center ``q``, budget ``epsilon``, pre-bump value ``L``,
    oscillation radius ``R`` and half-width ``r``."""

    k: int
    q: Fraction
    epsilon: float
    L: float
    R: float
    r: float
    alpha: float

    @property
    def arc(self) -> PowerArc:
        return PowerArc(self.q, 2.0 * self.L / self.r**self.alpha, self.alpha)

    def _around(self, radius: float) -> Interval:
        d = Fraction(radius)
        return Interval(self.q - d, self.q + d)

    @property
    def I(self) -> Interval:  # noqa: E743
        return self._around(self.r)

    @property
    def J(self) -> Interval:
        return self._around(self.R)

    @property
    def J_plus(self) -> Interval:
        return Interval(self.q + Fraction(self.r), self.q + Fraction(self.R))

    @property
    def J_minus(self) -> Interval:
        return Interval(self.q - Fraction(self.R), self.q - Fraction(self.r))

    @property
    def oscillation_window(self) -> Interval:
        return self._around(4.0 * self.R)

    def constraint_report(self) -> dict:
        """The three half-width constraints, re-evaluated."""
        eps, r, R = self.epsilon, self.r, self.R
        return {
            "budget": r <= self.L ** (1.0 / self.alpha) * eps,
            "separation": 8.0 * r <= eps * (R - r),
            "ap_uniform": 2.0 * r * shape_constant(self.alpha) <= eps * (R - r),
            "ordered": 0.0 < r < R,
        }

    def csv_row(self) -> list:
        return [str(self.k), str(self.q.numerator), str(self.q.denominator),
                fmt(self.epsilon), fmt(self.L), fmt(self.R), fmt(self.r)]


def choose_R(prev: PiecewisePowerFn, q, window: Interval) -> float:
    """Largest R on the dyadic ladder from ``min(1, dist(q, boundary)/4)``
    keeping ``prev`` within a factor 2 of ``prev(q)`` on ``|x - q| <= 4R``."""
    q = as_point(q)
    L = pw_eval(prev, q)
    if L <= 0.0:
        raise ZeroAtCenter(f"previous level vanishes at q = {q}")
    dist = min(q - window.lo, window.hi - q)
    if dist <= 0:
        raise ValueError("bump center must lie inside the window")
    R = float(min(Fraction(1), dist / 4))
    while R > 0.0:
        d = Fraction(4.0 * R)
        lo, hi = pw_extrema(prev, Interval(q - d, q + d))
        if lo >= L / 2 and hi <= 2 * L:
            return R
        R /= 2.0
    raise ZeroAtCenter(f"no oscillation radius found at q = {q}")


def choose_r(L: float, R: float, eps: float, alpha: float) -> float:
    beta = 1.0 / alpha
    return 0.5 * min(
        L**beta * eps,
        eps * R / (8.0 + eps),
        eps * R / (2.0 * shape_constant(alpha) + eps),
    )


def build_stage(prev: PiecewisePowerFn, q, eps: float, alpha: float,
                window: Interval, k: int = 1) -> tuple:
    q = as_point(q)
    L = pw_eval(prev, q)
    if L <= 0.0:
        raise ZeroAtCenter(f"previous level vanishes at q = {q}")
    R = choose_R(prev, q, window)
    r = choose_r(L, R, eps, alpha)
    try:
        coeff_ok = math.isfinite(2.0 * L / r**alpha)
    except (OverflowError, ZeroDivisionError):
        coeff_ok = False
    if not coeff_ok:
        raise ZeroAtCenter(f"bump coefficient overflows at stage {k} (r = {r})")
    stage = Stage(k=k, q=q, epsilon=eps, L=L, R=R, r=r, alpha=alpha)
    return stage, pw_min(prev, stage.arc, stage.I)


@dataclass
class WeightSequence:
    params: ConstructionParams
    stages: list
    levels: list  # levels[k] is w_k, levels[0] == 1

    @property
    def K(self) -> int:
        return len(self.stages)

    @property
    def final(self) -> PiecewisePowerFn:
        return self.levels[-1]

    def level(self, k: int) -> PiecewisePowerFn:
        return self.levels[k]

    @property
    def centers(self) -> list:
        return [s.q for s in self.stages]

    def epsilons(self) -> list:
        return [s.epsilon for s in self.stages]

    def stage_table_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(STAGE_CSV_HEADER)
        for st in self.stages:
            writer.writerow(st.csv_row())
        return buf.getvalue()


def build(params: ConstructionParams) -> WeightSequence:
    K = int(params.max_stages)
    qs = enumerate_rationals(params.window, K) if K else []
    w = PiecewisePowerFn.constant(1.0)
    stages, levels = [], [w]
    for k, q in enumerate(qs, start=1):
        st, w = build_stage(w, q, params.epsilon(k), params.alpha, params.window, k)
        stages.append(st)
        levels.append(w)
    return WeightSequence(params, stages, levels)


def weight_at(seq: WeightSequence, k: int, x) -> float:
    """``w_k(x)`` from the stage data alone, O(k)."""
    if not 0 <= k <= seq.K:
        raise IndexError(f"level {k} outside 0..{seq.K}")
    x = as_point(x)
    xf = float(x)
    val = 1.0
    for st in seq.stages[:k]:
        qf = float(st.q)
        # cheap rejection; exact test below
        if abs(xf - qf) > st.r + 4.0 * math.ulp(max(abs(qf), abs(xf))):
            continue
        d = abs(float(x - st.q))
        if d <= st.r:
            val = min(val, 2.0 * st.L * (d / st.r) ** st.alpha)
    return val


def weight_at_array(seq: WeightSequence, k: int, xs) -> np.ndarray:
    """Float-precision vectorised ``w_k``; bumps narrower than the local float
    spacing are invisible here, which only matters on null sets."""
    xs = np.asarray(xs, dtype=float)
    out = np.ones_like(xs)
    for st in seq.stages[:k]:
        d = np.abs(xs - float(st.q))
        inside = d <= st.r
        if inside.any():
            out[inside] = np.minimum(out[inside],
                                     2.0 * st.L * (d[inside] / st.r) ** st.alpha)
    return out


def product_weight_at(seq: WeightSequence, point: Sequence) -> float:
    if len(point) < 1:
        raise ValueError("point must have at least one coordinate")
    return min(weight_at(seq, seq.K, x) for x in point)


def mc_integral_nd(seq: WeightSequence, s: float, box: Sequence, samples: int,
                   seed: int, level: int | None = None, chunk: int = 1 << 18) -> tuple:
    """Monte-Carlo estimate of the integral of ``w_hat ** s`` over ``box``.

    ``box`` is a sequence of ``(lo, hi)`` pairs, one per dimension.  Returns
    ``(estimate, standard_error)``; deterministic for a given seed.
    """
    k = seq.K if level is None else level
    box = np.asarray([[float(a), float(b)] for a, b in box])
    n = box.shape[0]
    vol = float(np.prod(box[:, 1] - box[:, 0]))
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        pts = box[:, 0] + rng.random((m, n)) * (box[:, 1] - box[:, 0])
        w_hat = weight_at_array(seq, k, pts.ravel()).reshape(m, n).min(axis=1)
        vals = w_hat**s
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += m
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    if samples > 1:
        var *= samples / (samples - 1)
    return vol * mean, vol * math.sqrt(var / samples)


def stage_increments(seq: WeightSequence, s: float, theta: float = 0.0) -> list:
    """Per-stage change of ``\\int w_k**s |log(w_k / rbar)|**-theta``.

    Computed on the bump support only, where ``w_k`` and ``w_{k-1}`` differ,
    so the increments keep full relative precision however small they are.
    """
    log_r = log_rbar(seq.params.alpha)
    out = []
    for st in seq.stages:
        new, old = seq.levels[st.k], seq.levels[st.k - 1]
        if theta == 0.0:
            a = integrate_power(new, s, st.I)
            b = integrate_power(old, s, st.I)
        else:
            a = integrate_log_power(new, s, theta, st.I, log_r)
            b = integrate_log_power(old, s, theta, st.I, log_r)
        out.append(a - b if math.isfinite(a) else math.inf)
    return out
