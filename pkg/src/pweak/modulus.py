"""p-modulus of interval curves on the line.

Curves are the identity parametrisations of compact intervals, so a family is
just a finite list of :class:`~pweak.power_arcs.Interval`.  Measures are an
absolutely continuous part with piecewise power-law density plus finitely many
atoms.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize

from .errors import (
    DegenerateInterval,
    EmptyFamily,
    InvalidExponent,
    NotConverged,
)
from .power_arcs import (
    EXPONENT_TOL,
    QUAD_RTOL,
    Interval,
    PiecewisePowerFn,
    PowerArc,
    _log_power_piece,
    _piece_integral,
    _power_piece,
    arc_eval,
    as_point,
    integrate_log_power,
    integrate_power,
    pw_eval,
)

CONTINUITY_RTOL = 1e-12


@dataclass(frozen=True)
class MeasureSpec:
    """``mu = density * dx + sum(mass * delta_at)``.

    ``window`` records the span declared on load; the density keeps its
    outermost arcs beyond it.
    """

    density: PiecewisePowerFn
    atoms: tuple = ()
    window: Interval | None = None

    def __post_init__(self):
        atoms = tuple(sorted((as_point(a), float(m)) for a, m in self.atoms))
        for (a, m) in atoms:
            if not m > 0:
                raise ValueError(f"atom mass must be positive, got {m}")
        locs = [a for a, _ in atoms]
        if len(set(locs)) != len(locs):
            raise ValueError("atom locations must be distinct")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def lebesgue(cls) -> "MeasureSpec":
        return cls(PiecewisePowerFn.constant(1.0))

    @property
    def atom_locations(self) -> list:
        return [a for a, _ in self.atoms]

    def is_atom(self, x) -> bool:
        x = as_point(x)
        i = bisect_left(self.atom_locations, x)
        return i < len(self.atoms) and self.atoms[i][0] == x

    def with_atoms(self, atoms) -> "MeasureSpec":
        return MeasureSpec(self.density, tuple(self.atoms) + tuple(atoms), self.window)

    def scaled(self, t: float) -> "MeasureSpec":
        """Absolutely continuous part multiplied by ``t``."""
        arcs = [PowerArc(a.center, a.coeff * t, a.exponent) for a in self.density.arcs]
        return MeasureSpec(PiecewisePowerFn(self.density.breaks, arcs), self.atoms, self.window)

    def to_json(self) -> dict:
        lo, hi = self._json_window()
        segs = []
        for plo, phi, arc in self.density.pieces(lo, hi):
            segs.append({"from": float(plo), "to": float(phi), "center": float(arc.center),
                         "coeff": arc.coeff, "exponent": arc.exponent})
        return {"density": segs,
                "atoms": [{"at": float(a), "mass": m} for a, m in self.atoms]}

    def _json_window(self):
        if self.window is not None:
            return self.window.lo, self.window.hi
        pts = list(self.density.breaks) + self.atom_locations
        if not pts:
            return Fraction(0), Fraction(1)
        lo, hi = min(pts), max(pts)
        return (lo - 1, hi + 1)

    @classmethod
    def from_json(cls, obj: dict) -> "MeasureSpec":
        segs = obj.get("density")
        if not segs:
            raise ValueError("measure needs at least one density segment")
        arcs, edges = [], []
        for s in segs:
            lo, hi = as_point(s["from"]), as_point(s["to"])
            if not lo < hi:
                raise ValueError(f"density segment [{s['from']}, {s['to']}] is empty")
            if edges and lo != edges[-1]:
                raise ValueError("density segments must tile the window without gaps")
            if not edges:
                edges.append(lo)
            edges.append(hi)
            arcs.append(PowerArc(s.get("center", 0.0), s["coeff"], s.get("exponent", 0.0)))
        for b, left, right in zip(edges[1:-1], arcs, arcs[1:]):
            if left.coeff == 0.0 or right.coeff == 0.0:
                continue  # zero-density regions may jump
            vl, vr = arc_eval(left, b), arc_eval(right, b)
            if abs(vl - vr) > CONTINUITY_RTOL * max(abs(vl), abs(vr), 1e-300):
                raise ValueError(f"density discontinuous at x = {float(b)}: {vl} vs {vr}")
        density = PiecewisePowerFn.from_pieces(list(zip(edges[1:-1], arcs)) + [(None, arcs[-1])])
        atoms = [(a["at"], a["mass"]) for a in obj.get("atoms", [])]
        return cls(density, tuple(atoms), Interval(edges[0], edges[-1]))


@dataclass(frozen=True)
class CurveFamily:
    intervals: tuple

    def __post_init__(self):
        ivs = tuple(iv if isinstance(iv, Interval) else Interval(*iv) for iv in self.intervals)
        for iv in ivs:
            if not iv.lo < iv.hi:
                raise DegenerateInterval(f"curve {iv} is a point")
        object.__setattr__(self, "intervals", ivs)

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __add__(self, other: "CurveFamily") -> "CurveFamily":
        return CurveFamily(self.intervals + other.intervals)

    @property
    def hull(self) -> Interval:
        return Interval(min(iv.lo for iv in self.intervals), max(iv.hi for iv in self.intervals))


@dataclass
class ModulusResult:
    value: float
    g: np.ndarray
    edges: list
    lam: np.ndarray
    max_violation: float
    iterations: int
    gap: float
    converged: bool
    regularized: bool = False

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "gap": self.gap,
            "iterations": self.iterations,
            "g": [float(v) for v in self.g],
            "lambda": [float(v) for v in self.lam],
            "edges": [float(e) for e in self.edges],
            "max_violation": self.max_violation,
            "converged": self.converged,
            "regularized": self.regularized,
        }


def _check_p(p: float):
    if not p > 1:
        raise InvalidExponent(f"p must exceed 1, got {p}")


def modulus_single(mu: MeasureSpec, interval: Interval, p: float) -> float:
    """Exact modulus of the single curve ``gamma_I``.

    With ``T = \\int_I f_a**(1/(1-p))`` the optimum is ``T**(1-p)``, attained by
    ``g = f_a**(1/(1-p))`` on ``I`` minus the atoms; ``T = inf`` gives 0.
    """
    _check_p(p)
    if not interval.lo < interval.hi:
        raise DegenerateInterval("single-curve modulus needs a nondegenerate interval")
    T = integrate_power(mu.density, 1.0 / (1.0 - p), interval)
    if math.isinf(T):
        return 0.0
    return T ** (1.0 - p)


def grid_edges(window: Interval, cells: int, extra=()) -> list:
    step = (window.hi - window.lo) / cells
    pts = {window.lo + i * step for i in range(cells + 1)}
    pts.update(as_point(x) for x in extra if window.lo <= as_point(x) <= window.hi)
    return sorted(pts)


def modulus_family_grid(mu: MeasureSpec, family: CurveFamily, p: float, cells: int = 2048,
                        window: Interval | None = None, tol: float = 1e-6,
                        max_iter: int = 100_000, strict: bool = False) -> ModulusResult:
    """Discretised modulus of a finite interval family.

    Minimises ``sum_c g_c**p mu_a(cell_c)`` subject to ``sum_{c in I_j} g_c dx_c >= 1``
    through its concave dual in the curve multipliers ``lam >= 0`` (L-BFGS-B),
    with the cell values recovered from the stationarity condition
    ``g_c = (dx_c (A^T lam)_c / (p mu_c)) ** (1/(p-1))``.  Cells with zero
    density are capped at ``10 / dx_c`` and flag the result as regularised.
    """
    _check_p(p)
    if len(family) == 0:
        raise EmptyFamily("curve family is empty")
    hull = family.hull
    window = hull if window is None else window
    if not (window.lo <= hull.lo and hull.hi <= window.hi):
        raise ValueError("all curves must lie inside the grid window")
    edges = grid_edges(window, cells, [x for iv in family for x in iv])
    dx = np.array([float(b - a) for a, b in zip(edges, edges[1:])])
    mass = np.array([integrate_power(mu.density, 1.0, Interval(a, b))
                     for a, b in zip(edges, edges[1:])])
    n_cells = len(dx)
    A = np.zeros((len(family), n_cells))
    for j, iv in enumerate(family):
        a, b = bisect_left(edges, iv.lo), bisect_left(edges, iv.hi)
        A[j, a:b] = dx[a:b]

    free = mass <= 0.0
    pos = ~free
    g_cap = 10.0 / dx
    inv = 1.0 / (p - 1.0)

    def recover(lam):
        y = lam @ A
        g = np.zeros(n_cells)
        g[pos] = (np.maximum(y[pos], 0.0) / (p * mass[pos])) ** inv
        g[free] = np.where(y[free] > 0.0, g_cap[free], 0.0)
        return g, y

    def neg_dual(lam):
        g, y = recover(lam)
        val = lam.sum() + (1.0 - p) * np.dot(mass[pos], g[pos] ** p) - np.dot(g[free], y[free])
        grad = 1.0 - A @ g
        return -val, -grad

    lam = np.ones(len(family))
    iterations = 0
    best = None
    while True:
        res = optimize.minimize(neg_dual, lam, jac=True, method="L-BFGS-B",
                                bounds=[(0.0, None)] * len(family),
                                options={"maxiter": min(15000, max_iter - iterations),
                                         "ftol": 1e-16, "gtol": 1e-13, "maxcor": 30})
        iterations += max(int(res.nit), 1)
        lam = res.x
        g, _ = recover(lam)
        line = A @ g
        low = float(line.min())
        dual = -float(res.fun)
        if low > 0.0:
            g_feas = g / low
            primal = float(np.dot(mass, g_feas**p))
            gap = (primal - dual) / max(abs(primal), 1e-300)
        else:
            g_feas, primal, gap = g, math.inf, math.inf
        if best is None or gap < best[2]:
            best = (g_feas, lam.copy(), gap, primal)
        # stop once converged, out of budget, or restarts stop making progress
        if best[2] < tol or iterations >= max_iter or res.nit <= 1:
            break
    g_feas, lam, gap, primal = best
    violation = float(max(0.0, 1.0 - (A @ g_feas).min())) if math.isfinite(primal) else math.inf
    result = ModulusResult(value=primal, g=g_feas, edges=edges, lam=lam, max_violation=violation,
                           iterations=iterations, gap=gap, converged=gap < tol,
                           regularized=bool(free.any()))
    if strict and not result.converged:
        raise NotConverged(f"duality gap {gap:.3g} above {tol}", result)
    return result


# ---------------------------------------------------------------------------
# null witnesses


@dataclass(frozen=True)
class Witness:
    """``g = base**power * |log(base) - log_r| ** -log_power`` on ``window``, 0 outside."""

    base: PiecewisePowerFn
    power: float
    window: Interval
    log_power: float = 0.0
    log_r: float = 0.0

    def __call__(self, x) -> float:
        x = as_point(x)
        if not self.window.contains(x):
            return 0.0
        b = pw_eval(self.base, x)
        if b == 0.0:
            return math.inf if self.power < 0 else (1.0 if self.power == 0 else 0.0)
        val = b**self.power
        if self.log_power:
            val *= abs(math.log(b) - self.log_r) ** (-self.log_power)
        return val

    def line_integral(self, interval: Interval) -> float:
        lo, hi = max(interval.lo, self.window.lo), min(interval.hi, self.window.hi)
        if lo >= hi:
            return 0.0
        iv = Interval(lo, hi)
        if self.log_power == 0.0:
            return integrate_power(self.base, self.power, iv)
        return integrate_log_power(self.base, self.power, self.log_power, iv, self.log_r)


def _factor_piece(base: PowerArc, s: float, theta: float, log_r: float,
                  dens: PowerArc, lo: Fraction, hi: Fraction) -> float:
    """``\\int base**s |log base - log_r|**-theta * dens`` over one common piece."""
    if dens.coeff == 0.0:
        return 0.0
    if dens.exponent == 0.0:
        if theta == 0.0:
            return dens.coeff * _power_piece(base, s, lo, hi)
        return dens.coeff * _log_power_piece(base, s, theta, log_r, lo, hi)
    if base.exponent == 0.0:
        if base.coeff == 0.0:
            return 0.0 if s > 0 else math.inf
        k = base.coeff**s
        if theta:
            k *= abs(math.log(base.coeff) - log_r) ** (-theta)
        return k * _power_piece(dens, 1.0, lo, hi)
    logpart = (math.log(base.coeff) - log_r, base.exponent, theta) if theta else None
    if base.center == dens.center:
        return _piece_integral(s * math.log(base.coeff) + math.log(dens.coeff),
                               base.exponent * s + dens.exponent, base.center, lo, hi, logpart)
    return _quad_product(base, s, theta, log_r, dens, lo, hi)


def _quad_product(base, s, theta, log_r, dens, lo, hi) -> float:
    a = base.center
    gamma = base.exponent * s
    lc = math.log(base.coeff) - log_r
    k = base.coeff**s

    def base_factor(rho):
        v = k * rho**gamma
        if theta:
            v *= abs(lc + base.exponent * math.log(rho)) ** (-theta)
        return v

    def dens_at(offset):
        return dens.coeff * abs(float(a - dens.center) + offset) ** dens.exponent

    total = 0.0
    if lo < a < hi or a == lo or a == hi:
        for sign, d in ((-1.0, float(a - lo)), (1.0, float(hi - a))):
            if d <= 0.0:
                continue
            m = gamma + 1.0
            if m < -EXPONENT_TOL:
                return math.inf
            if abs(m) <= EXPONENT_TOL:
                if not theta or theta <= 1.0:
                    return math.inf
                val, _ = sp_integrate.quad(
                    lambda u: k * abs(lc + base.exponent * u) ** (-theta) * dens_at(sign * math.exp(u)),
                    -np.inf, math.log(d), epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
            else:
                val, _ = sp_integrate.quad(
                    lambda r: base_factor(r) / r**gamma * dens_at(sign * r) if r > 0 else 0.0,
                    0.0, d, weight="alg", wvar=(gamma, 0.0), epsabs=0.0, epsrel=QUAD_RTOL,
                    limit=200)
            total += val
        return total
    off = float(lo - a)
    h = float(hi - lo)
    val, _ = sp_integrate.quad(lambda t: base_factor(abs(off + t)) * dens_at(off + t), 0.0, h,
                               epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
    return val


def witness_mass(g: Witness, mu: MeasureSpec, p: float) -> float:
    """``\\int g**p dmu``: absolutely continuous part exact where possible, atoms summed."""
    s, theta = g.power * p, g.log_power * p
    lo, hi = g.window.lo, g.window.hi
    cuts = sorted({lo, hi} | {b for b in g.base.breaks + mu.density.breaks if lo < b < hi})
    parts = []
    for a, b in zip(cuts, cuts[1:]):
        mid = (a + b) / 2
        base = g.base.arcs[g.base.segment_index(mid)]
        dens = mu.density.arcs[mu.density.segment_index(mid)]
        parts.append(_factor_piece(base, s, theta, g.log_r, dens, a, b))
    for loc, m in mu.atoms:
        parts.append(m * g(loc) ** p)
    if any(math.isinf(v) for v in parts):
        return math.inf
    return math.fsum(parts)


class NullWitnessCheck(NamedTuple):
    ok: bool
    mass: float
    curve_integrals: list


def verify_null_witness(mu: MeasureSpec, g: Witness, family: CurveFamily,
                        p: float) -> NullWitnessCheck:
    """``g`` certifies a null family iff ``\\int g**p dmu < inf`` and every curve
    integral of ``g`` diverges."""
    if not p >= 1:
        raise InvalidExponent(f"p must be >= 1, got {p}")
    mass = witness_mass(g, mu, p)
    lines = [g.line_integral(iv) for iv in family]
    ok = math.isfinite(mass) and all(math.isinf(v) for v in lines)
    return NullWitnessCheck(ok, mass, lines)
