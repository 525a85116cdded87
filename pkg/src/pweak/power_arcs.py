"""Exact calculus for piecewise power-law functions.

A :class:`PiecewisePowerFn` is a continuous function on the real line made of
arcs ``x -> c * |x - a| ** e``.  Abscissae (arc centers and breakpoints) are
stored as :class:`fractions.Fraction` so that bumps far narrower than the
spacing of doubles around their center stay resolvable; all distances are
formed exactly and only then rounded to ``float``.

Integrals are returned as plain floats, with ``math.inf`` standing for a
divergent integral.  Divergence is decided from the exponents, never from a
numerical blow-up.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterator, NamedTuple, Sequence

from scipy import integrate as _sp_integrate

from .errors import PreconditionViolated, UnsupportedExponentPair

__all__ = [
    "ExtReal",
    "Interval",
    "PowerArc",
    "PiecewisePowerFn",
    "Crossings",
    "as_point",
    "arc_eval",
    "crossings",
    "pw_min",
    "pw_eval",
    "pw_extrema",
    "integrate_power",
    "integrate_log_power",
    "integrate_log_corrected",
    "log_rbar",
]

#: Nonnegative real or ``math.inf``.
ExtReal = float

# Exponent comparisons (e*s against -1) are made with this slack so that
# e.g. alpha * (-1/alpha) counts as exactly -1.
EXPONENT_TOL = 1e-12
QUAD_RTOL = 1e-8


def as_point(x) -> Fraction:
    """Convert a coordinate to an exact Fraction (floats convert exactly)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    xf = float(x)
    if not math.isfinite(xf):
        raise ValueError(f"coordinate must be finite, got {x!r}")
    return Fraction(xf)


def _snap_exponent(m: float) -> float:
    return 0.0 if abs(m) <= EXPONENT_TOL else m


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with exact endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_point(self.lo), as_point(self.hi)
        if lo > hi:
            raise ValueError(f"interval with lo > hi: [{float(lo)}, {float(hi)}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> float:
        return float(self.hi - self.lo)

    @property
    def center(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        x = as_point(x)
        return self.lo <= x <= self.hi

    def meets(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def scaled(self, factor) -> "Interval":
        """Same center, length multiplied by ``factor``."""
        half = (self.hi - self.lo) * as_point(factor) / 2
        c = self.center
        return Interval(c - half, c + half)

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __repr__(self):
        return f"Interval({float(self.lo)!r}, {float(self.hi)!r})"


@dataclass(frozen=True)
class PowerArc:
    """The map ``x -> coeff * |x - center| ** exponent``.

    ``exponent == 0`` encodes the constant ``coeff``.  A zero coefficient is
    accepted only for constants; measure densities use it for regions of zero
    density.
    """

    center: Fraction
    coeff: float
    exponent: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        c, e = float(self.coeff), float(self.exponent)
        if not (e >= 0.0 and math.isfinite(e)):
            raise ValueError(f"arc exponent must be >= 0, got {e}")
        if not (c >= 0.0 and math.isfinite(c)):
            raise ValueError(f"arc coefficient must be finite and >= 0, got {c}")
        if c == 0.0 and e != 0.0:
            raise ValueError("zero coefficient only allowed for constant arcs")
        if e == 0.0:
            # constants carry no meaningful center
            object.__setattr__(self, "center", Fraction(0))
        object.__setattr__(self, "coeff", c)
        object.__setattr__(self, "exponent", e)

    @classmethod
    def constant(cls, value: float) -> "PowerArc":
        return cls(Fraction(0), value, 0.0)

    @property
    def is_constant(self) -> bool:
        return self.exponent == 0.0

    def distance(self, x) -> float:
        return abs(float(as_point(x) - self.center))

    def __call__(self, x) -> float:
        return arc_eval(self, x)


def arc_eval(arc: PowerArc, x) -> float:
    if arc.exponent == 0.0:
        return arc.coeff
    d = abs(float(as_point(x) - arc.center))
    if d == 0.0:
        return 0.0
    return arc.coeff * d**arc.exponent


class Crossings(NamedTuple):
    roots: list
    everywhere: bool = False


def crossings(arc1: PowerArc, arc2: PowerArc) -> Crossings:
    """Solve ``arc1(x) == arc2(x)`` in closed form.

    Supported pairs are equal positive exponents and arc-versus-constant.
    Roots are exact Fractions anchored at the nearer arc center, so their
    offset from that center carries full float precision.
    """
    e1, e2 = arc1.exponent, arc2.exponent
    if e1 == 0.0 and e2 == 0.0:
        return Crossings([], arc1.coeff == arc2.coeff)
    if e1 == 0.0 or e2 == 0.0:
        arc, const = (arc2, arc1) if e1 == 0.0 else (arc1, arc2)
        t = const.coeff / arc.coeff
        if t == 0.0:
            return Crossings([arc.center])
        d = Fraction(t ** (1.0 / arc.exponent))
        return Crossings([arc.center - d, arc.center + d])
    if e1 != e2:
        raise UnsupportedExponentPair(
            f"cannot intersect arcs with exponents {e1} and {e2}"
        )
    if arc1 == arc2:
        return Crossings([], True)
    a1, a2 = arc1.center, arc2.center
    if a1 == a2:
        return Crossings([a1])
    # |x - a1| = lam * |x - a2|
    lam = (arc2.coeff / arc1.coeff) ** (1.0 / e1)
    d = float(a2 - a1)
    roots = []
    # x - a1 = lam*d/(1+lam), x - a2 = -d/(1+lam)
    roots.append(_anchor(a1, lam * d / (1.0 + lam), a2, -d / (1.0 + lam)))
    if lam != 1.0:
        # x - a1 = lam*d/(lam-1), x - a2 = d/(lam-1)
        roots.append(_anchor(a1, lam * d / (lam - 1.0), a2, d / (lam - 1.0)))
    return Crossings(sorted(roots))


def _anchor(a1: Fraction, off1: float, a2: Fraction, off2: float) -> Fraction:
    if abs(off1) <= abs(off2):
        return a1 + Fraction(off1)
    return a2 + Fraction(off2)


class PiecewisePowerFn:
    """Continuous piecewise power-law function on the real line.

    Segment ``i`` covers ``(breaks[i-1], breaks[i]]`` with the outermost
    segments unbounded; the value at a breakpoint is taken from the left
    segment.  Instances are immutable after construction.
    """

    __slots__ = ("breaks", "arcs", "_cache")

    def __init__(self, breaks: Sequence, arcs: Sequence[PowerArc]):
        breaks = tuple(as_point(b) for b in breaks)
        arcs = tuple(arcs)
        if len(arcs) != len(breaks) + 1:
            raise ValueError("need exactly one arc per gap between breakpoints")
        for left, right in zip(breaks, breaks[1:]):
            if not left < right:
                raise ValueError("breakpoints must be strictly increasing")
        self.breaks = breaks
        self.arcs = arcs
        self._cache = {}

    @classmethod
    def constant(cls, value: float = 1.0) -> "PiecewisePowerFn":
        return cls((), (PowerArc.constant(value),))

    @classmethod
    def single(cls, arc: PowerArc) -> "PiecewisePowerFn":
        return cls((), (arc,))

    @classmethod
    def from_pieces(cls, pieces) -> "PiecewisePowerFn":
        """Build from ``(right_end, arc)`` pairs; the last right end is None.

        Adjacent equal arcs are merged and empty pieces dropped.
        """
        rights, arcs = [], []
        for right, arc in pieces:
            if rights and right is not None and right <= rights[-1]:
                continue
            if arcs and arcs[-1] == arc:
                rights[-1] = right
            else:
                rights.append(right)
                arcs.append(arc)
        if not rights or rights[-1] is not None:
            raise ValueError("last piece must be unbounded on the right")
        return cls(rights[:-1], arcs)

    def __len__(self):
        return len(self.arcs)

    def __eq__(self, other):
        if not isinstance(other, PiecewisePowerFn):
            return NotImplemented
        return self.breaks == other.breaks and self.arcs == other.arcs

    def __hash__(self):
        return hash((self.breaks, self.arcs))

    def __repr__(self):
        return f"PiecewisePowerFn(<{len(self.arcs)} segments>)"

    def __call__(self, x) -> float:
        return pw_eval(self, x)

    def segment_index(self, x) -> int:
        return bisect_left(self.breaks, as_point(x))

    def segment_bounds(self, i: int):
        lo = self.breaks[i - 1] if i > 0 else None
        hi = self.breaks[i] if i < len(self.breaks) else None
        return lo, hi

    def pieces(self, lo=None, hi=None) -> Iterator[tuple]:
        """Yield ``(plo, phi, arc)`` for segments clipped to ``[lo, hi]``.

        ``None`` stands for an unbounded end.  Zero-length clips are skipped
        unless ``lo == hi``.
        """
        lo = None if lo is None else as_point(lo)
        hi = None if hi is None else as_point(hi)
        if lo is not None and hi is not None and lo == hi:
            yield lo, hi, self.arcs[self.segment_index(lo)]
            return
        start = 0 if lo is None else bisect_right(self.breaks, lo)
        stop = len(self.breaks) if hi is None else bisect_left(self.breaks, hi)
        for i in range(start, stop + 1):
            plo, phi = self.segment_bounds(i)
            if lo is not None and (plo is None or plo < lo):
                plo = lo
            if hi is not None and (phi is None or phi > hi):
                phi = hi
            if plo is not None and phi is not None and plo >= phi:
                continue
            yield plo, phi, self.arcs[i]

    def zeros(self) -> list:
        """Centers of positive-exponent arcs lying in the closure of their segment."""
        out = []
        for i, arc in enumerate(self.arcs):
            if arc.exponent > 0.0:
                lo, hi = self.segment_bounds(i)
                a = arc.center
                if (lo is None or lo <= a) and (hi is None or a <= hi):
                    if not out or out[-1] != a:
                        out.append(a)
        return out

    def max_exponent(self) -> float:
        return max(a.exponent for a in self.arcs)


def pw_eval(f: PiecewisePowerFn, x) -> float:
    x = as_point(x)
    return arc_eval(f.arcs[bisect_left(f.breaks, x)], x)


def _closure_has(lo, hi, a) -> bool:
    return (lo is None or lo <= a) and (hi is None or a <= hi)


def pw_min(f: PiecewisePowerFn, arc: PowerArc, support: Interval) -> PiecewisePowerFn:
    """Pointwise minimum of ``f`` and ``arc`` on ``support``; ``f`` elsewhere."""
    lo, hi = support.lo, support.hi
    if lo == hi:
        return f
    out = []
    for plo, phi, seg in f.pieces():
        if (phi is not None and phi <= lo) or (plo is not None and plo >= hi):
            out.append((phi, seg))
            continue
        a0 = lo if plo is None or plo < lo else plo
        b0 = hi if phi is None or phi > hi else phi
        if plo is None or plo < lo:
            out.append((lo, seg))
        cut = crossings(seg, arc)
        pts = [a0] + [x for x in cut.roots if a0 < x < b0] + [b0]
        for u, v in zip(pts, pts[1:]):
            if cut.everywhere:
                out.append((v, seg))
                continue
            mid = (u + v) / 2
            out.append((v, arc if arc_eval(arc, mid) < arc_eval(seg, mid) else seg))
        if phi is None or phi > hi:
            out.append((phi, seg))
    return PiecewisePowerFn.from_pieces(out)


def pw_extrema(f: PiecewisePowerFn, interval: Interval) -> tuple:
    """Exact ``(min, max)`` of ``f`` over a finite closed interval."""
    vals = []
    for plo, phi, arc in f.pieces(interval.lo, interval.hi):
        vals.append(arc_eval(arc, plo))
        vals.append(arc_eval(arc, phi))
        if arc.exponent > 0.0 and plo <= arc.center <= phi:
            vals.append(0.0)
    return min(vals), max(vals)


# ---------------------------------------------------------------------------
# integration kernel


def _one_sided(log_k: float, gamma: float, rho1: float, h: float, rho2: float,
               logpart) -> float:
    """Integral of ``K t**gamma * L(t)`` over ``[rho1, rho1 + h]``, ``rho1 >= 0``.

    ``logpart`` is None (L == 1) or ``(lc, le, theta)`` with
    ``L(t) = |lc + le*log(t)| ** -theta``.
    """
    if h <= 0.0:
        return 0.0
    if logpart is not None:
        lc, le, theta = logpart
        if theta == 0.0:
            logpart = None
        elif le == 0.0:
            log_k -= theta * math.log(abs(lc))
            logpart = None
    m = _snap_exponent(gamma + 1.0)
    if logpart is None:
        if rho1 == 0.0:
            if m <= 0.0:
                return math.inf
            return math.exp(log_k + m * math.log(rho2)) / m
        if m == 0.0:
            return math.exp(log_k) * math.log1p(h / rho1)
        if h <= rho1:
            return math.exp(log_k + m * math.log(rho1)) * math.expm1(m * math.log1p(h / rho1)) / m
        return (math.exp(log_k + m * math.log(rho2)) - math.exp(log_k + m * math.log(rho1))) / m

    lc, le, theta = logpart
    if m == 0.0:
        # substitution u = log t turns the integrand into K*|lc + le*u|**-theta
        v2 = lc + le * math.log(rho2)
        scale = math.exp(log_k) / abs(le)
        if rho1 == 0.0:
            if theta <= 1.0:
                return math.inf
            return scale * abs(v2) ** (1.0 - theta) / (theta - 1.0)
        v1 = lc + le * math.log(rho1)
        if v1 == 0.0 or v2 == 0.0 or (v1 < 0.0) != (v2 < 0.0):
            raise PreconditionViolated("log factor vanishes inside the segment")
        tmin = min(abs(v1), abs(v2))
        delta = abs(le) * math.log1p(h / rho1)
        if theta == 1.0:
            return scale * math.log1p(delta / tmin)
        q = 1.0 - theta
        return scale * tmin**q * abs(math.expm1(q * math.log1p(delta / tmin))) / abs(q)
    if rho1 == 0.0 and m < 0.0:
        return math.inf

    k = math.exp(log_k)

    def weight(t):
        if t <= 0.0:
            return 0.0
        v = lc + le * math.log(t)
        return k * abs(v) ** (-theta)

    if rho1 == 0.0:
        val, _ = _sp_integrate.quad(weight, 0.0, rho2, weight="alg", wvar=(gamma, 0.0),
                                    epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
        return val
    val, _ = _sp_integrate.quad(lambda tau: weight(rho1 + tau) * (rho1 + tau) ** gamma,
                                0.0, h, epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
    return val


def _piece_integral(log_k: float, gamma: float, center: Fraction, lo: Fraction,
                    hi: Fraction, logpart=None) -> float:
    """Integral of ``K |x - center|**gamma * L(|x - center|)`` over ``[lo, hi]``."""
    if lo >= hi:
        return 0.0
    if lo <= center <= hi:
        left = _one_sided(log_k, gamma, 0.0, float(center - lo), float(center - lo), logpart) \
            if lo < center else 0.0
        right = _one_sided(log_k, gamma, 0.0, float(hi - center), float(hi - center), logpart) \
            if center < hi else 0.0
        return left + right
    if center < lo:
        near, far = lo - center, hi - center
    else:
        near, far = center - hi, center - lo
    return _one_sided(log_k, gamma, float(near), float(hi - lo), float(far), logpart)


def _power_piece(arc: PowerArc, s: float, lo: Fraction, hi: Fraction) -> float:
    if lo >= hi:
        return 0.0
    c, e = arc.coeff, arc.exponent
    if c == 0.0:
        if s > 0.0:
            return 0.0
        return float(hi - lo) if s == 0.0 else math.inf
    if e == 0.0 or s == 0.0:
        return c**s * float(hi - lo)
    return _piece_integral(s * math.log(c), e * s, arc.center, lo, hi)


def _log_power_piece(arc: PowerArc, s: float, theta: float, log_r: float,
                     lo: Fraction, hi: Fraction) -> float:
    if lo >= hi:
        return 0.0
    c, e = arc.coeff, arc.exponent
    if c == 0.0:
        if s > 0.0:
            return 0.0
        return math.inf if s < 0.0 else 0.0
    lc = math.log(c) - log_r
    if e == 0.0:
        if lc == 0.0:
            raise PreconditionViolated("log factor vanishes on a constant segment")
        return c**s * abs(lc) ** (-theta) * float(hi - lo)
    return _piece_integral(s * math.log(c), e * s, arc.center, lo, hi, (lc, e, theta))


def _integrate(f: PiecewisePowerFn, interval: Interval, key, piece: Callable) -> float:
    """Sum ``piece(arc, lo, hi)`` over the segments meeting ``interval``.

    Whole interior segments are cached per ``key`` on ``f``.
    """
    lo, hi = interval.lo, interval.hi
    if lo >= hi:
        return 0.0
    br = f.breaks
    i0 = bisect_right(br, lo)
    i1 = bisect_left(br, hi)
    if i0 == i1:
        return piece(f.arcs[i0], lo, hi)
    cache = f._cache.get(key)
    if cache is None:
        cache = [None] * len(f.arcs)
        f._cache[key] = cache
    parts = [piece(f.arcs[i0], lo, br[i0]), piece(f.arcs[i1], br[i1 - 1], hi)]
    for i in range(i0 + 1, i1):
        v = cache[i]
        if v is None:
            v = cache[i] = piece(f.arcs[i], br[i - 1], br[i])
        parts.append(v)
    if math.inf in parts:
        return math.inf
    return math.fsum(parts)


def integrate_power(f: PiecewisePowerFn, s: float, interval: Interval) -> ExtReal:
    """``\\int_I f(x)**s dx`` exactly, ``math.inf`` when divergent."""
    s = float(s)
    return _integrate(f, interval, ("pow", s),
                      lambda arc, lo, hi: _power_piece(arc, s, lo, hi))


def log_rbar(alpha: float) -> float:
    """``log`` of the normalising constant ``exp(alpha * (alpha + 1))``."""
    return alpha * (alpha + 1.0)


def integrate_log_power(f: PiecewisePowerFn, s: float, theta: float,
                        interval: Interval, log_r: float) -> ExtReal:
    """``\\int_I f**s * |log(f) - log_r| ** -theta dx``.

    Closed form wherever ``exponent * s == -1`` (substitution ``u = log|x-a|``)
    or the arc is constant; bounded remaining segments go to adaptive
    quadrature with an algebraic end-point weight.
    """
    s, theta, log_r = float(s), float(theta), float(log_r)
    return _integrate(f, interval, ("logpow", s, theta, log_r),
                      lambda arc, lo, hi: _log_power_piece(arc, s, theta, log_r, lo, hi))


def integrate_log_corrected(f: PiecewisePowerFn, alpha: float, theta: float,
                            interval: Interval) -> ExtReal:
    """``\\int_I f**(-1/alpha) |log(f / rbar)| ** -theta`` with ``rbar = e**(alpha(alpha+1))``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if interval.lo < interval.hi:
        _, fmax = pw_extrema(f, interval)
        if fmax > 1.0:
            raise PreconditionViolated(f"weight exceeds 1 on the interval (max {fmax})")
    return integrate_log_power(f, -1.0 / alpha, theta, interval, log_rbar(alpha))
