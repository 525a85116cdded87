"""The p-weak gradient of piecewise-linear functions on the line.

A point ``x`` belongs to ``N_p`` when ``f_a**(1/(1-p))`` is integrable near
``x``.  For piecewise power-law densities this is decided structurally: it
fails exactly at arc zeros of exponent ``e >= p - 1`` and on the closure of
zero-density segments.  Off ``N_p`` and on the atoms the weak gradient is 0;
elsewhere it is ``|f'|``.
"""

from __future__ import annotations

import csv
import io
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import InvalidExponent, NotDifferentiable
from .modulus import MeasureSpec
from .power_arcs import EXPONENT_TOL, Interval, as_point
from .weights import fmt


@dataclass(frozen=True)
class LipschitzSpec:
    """Continuous piecewise-linear function.

    ``slopes`` has one entry per gap including the two unbounded ones, so
    ``len(slopes) == len(breakpoints) + 1``; ``value_at_left`` is the value at
    the leftmost breakpoint (at 0 when there are none).
    """

    breakpoints: tuple
    slopes: tuple
    value_at_left: float = 0.0

    def __post_init__(self):
        bps = tuple(as_point(b) for b in self.breakpoints)
        slopes = tuple(float(s) for s in self.slopes)
        if len(slopes) != len(bps) + 1:
            raise ValueError("need len(slopes) == len(breakpoints) + 1")
        if any(not a < b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if not all(math.isfinite(s) for s in slopes):
            raise ValueError("slopes must be finite")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", slopes)

    @classmethod
    def linear(cls, slope: float, intercept: float = 0.0) -> "LipschitzSpec":
        return cls((), (slope,), intercept)

    @property
    def lipschitz_constant(self) -> float:
        return max(abs(s) for s in self.slopes)

    def __call__(self, x) -> float:
        x = as_point(x)
        bps = self.breakpoints
        x0 = bps[0] if bps else Fraction(0)
        if not bps or x <= x0:
            return self.value_at_left + self.slopes[0] * float(x - x0)
        v = self.value_at_left
        for i in range(len(bps) - 1):
            if x <= bps[i + 1]:
                return v + self.slopes[i + 1] * float(x - bps[i])
            v += self.slopes[i + 1] * float(bps[i + 1] - bps[i])
        return v + self.slopes[-1] * float(x - bps[-1])

    def derivative(self, x) -> float:
        """``f'(x)``; raises NotDifferentiable at a kink."""
        x = as_point(x)
        i = bisect_left(self.breakpoints, x)
        if i < len(self.breakpoints) and self.breakpoints[i] == x:
            left, right = self.slopes[i], self.slopes[i + 1]
            if left != right:
                raise NotDifferentiable(f"f has a kink at x = {float(x)}")
            return left
        return self.slopes[i]

    def to_json(self) -> dict:
        return {"breakpoints": [float(b) for b in self.breakpoints],
                "slopes": list(self.slopes), "value_at_left": self.value_at_left}

    @classmethod
    def from_json(cls, obj: dict) -> "LipschitzSpec":
        return cls(tuple(obj["breakpoints"]), tuple(obj["slopes"]), obj.get("value_at_left", 0.0))


class Classification(NamedTuple):
    in_Np: bool
    witness: dict


def _check_p(p):
    if not p > 1:
        raise InvalidExponent(f"p must exceed 1, got {p}")


def _fails_exponent_test(e: float, p: float) -> bool:
    # f_a**(1/(1-p)) ~ |x-a|**(-e/(p-1)) is non-integrable iff e/(p-1) >= 1
    return e > 0.0 and e / (p - 1.0) >= 1.0 - EXPONENT_TOL


def classify_point(mu: MeasureSpec, p: float, x) -> Classification:
    _check_p(p)
    x = as_point(x)
    f = mu.density
    i = bisect_left(f.breaks, x)
    touching = [i]
    if i < len(f.breaks) and f.breaks[i] == x:
        touching.append(i + 1)
    lower = math.inf
    for j in touching:
        arc = f.arcs[j]
        if arc.coeff == 0.0:
            lo, hi = f.segment_bounds(j)
            return Classification(False, {"reason": "zero-density",
                                          "segment": (lo and float(lo), hi and float(hi))})
        if arc.exponent > 0.0 and arc.center == x:
            if _fails_exponent_test(arc.exponent, p):
                return Classification(False, {"reason": "exponent", "exponent": arc.exponent,
                                              "threshold": 1.0 + arc.exponent})
            return Classification(True, {"reason": "exponent", "exponent": arc.exponent,
                                         "threshold": 1.0 + arc.exponent})
        lower = min(lower, arc.coeff * (arc.distance(x) ** arc.exponent if arc.exponent else 1.0))
    return Classification(True, {"reason": "positive", "lower_bound": lower})


@dataclass
class NpReport:
    """Complement of ``N_p`` inside a query interval."""

    interval: Interval
    p: float
    points: list = field(default_factory=list)  # (location, exponent, threshold)
    subintervals: list = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.points and not self.subintervals

    @property
    def locations(self) -> list:
        return [x for x, _, _ in self.points]

    def to_json(self) -> dict:
        return {
            "interval": [float(self.interval.lo), float(self.interval.hi)],
            "p": self.p,
            "points": [{"at": float(x), "exponent": e, "threshold": t} for x, e, t in self.points],
            "subintervals": [[float(iv.lo), float(iv.hi)] for iv in self.subintervals],
        }


def np_complement(mu: MeasureSpec, p: float, interval: Interval) -> NpReport:
    _check_p(p)
    report = NpReport(interval, p)
    zero_runs = []
    seen = set()
    for plo, phi, arc in mu.density.pieces(interval.lo, interval.hi):
        if arc.coeff == 0.0:
            if zero_runs and zero_runs[-1][1] == plo:
                zero_runs[-1][1] = phi
            else:
                zero_runs.append([plo, phi])
            continue
        a = arc.center
        if arc.exponent > 0.0 and plo <= a <= phi and a not in seen:
            seen.add(a)
            if _fails_exponent_test(arc.exponent, p):
                report.points.append((a, arc.exponent, 1.0 + arc.exponent))
    report.subintervals = [Interval(lo, hi) for lo, hi in zero_runs]
    # points swallowed by a zero run are reported through the run
    report.points = sorted(pt for pt in report.points
                           if not any(iv.contains(pt[0]) for iv in report.subintervals))
    return report


def weak_gradient_at(mu: MeasureSpec, p: float, f: LipschitzSpec, x) -> float:
    _check_p(p)
    x = as_point(x)
    if mu.is_atom(x) or not classify_point(mu, p, x).in_Np:
        return 0.0
    return abs(f.derivative(x))


def weak_gradient_report(mu: MeasureSpec, p: float, f: LipschitzSpec, interval: Interval,
                         samples: int, points=()) -> list:
    """Rows ``(x, in_Np, is_atom, grad)`` on an equispaced grid plus ``points``.

    Points where the gradient is undefined (kinks of ``f`` inside ``N_p``
    away from atoms) are skipped.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    step = (interval.hi - interval.lo) / (samples - 1)
    xs = {interval.lo + i * step for i in range(samples)}
    xs.update(as_point(x) for x in points)
    rows = []
    for x in sorted(xs):
        in_np = classify_point(mu, p, x).in_Np
        atom = mu.is_atom(x)
        try:
            grad = weak_gradient_at(mu, p, f, x)
        except NotDifferentiable:
            continue
        rows.append((x, in_np, atom, grad))
    return rows


def report_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "in_Np", "is_atom", "grad"])
    for x, in_np, atom, grad in rows:
        w.writerow([fmt(float(x)), str(in_np).lower(), str(atom).lower(), fmt(grad)])
    return buf.getvalue()
