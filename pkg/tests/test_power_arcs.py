import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pweak.errors import PreconditionViolated, UnsupportedExponentPair
from pweak.power_arcs import (
    Interval,
    PiecewisePowerFn,
    PowerArc,
    arc_eval,
    crossings,
    integrate_log_corrected,
    integrate_power,
    log_rbar,
    pw_eval,
    pw_extrema,
    pw_min,
)


def tent():
    """2|x| on [-1/2, 1/2], 1 elsewhere."""
    return pw_min(PiecewisePowerFn.constant(1.0), PowerArc(0, 2.0, 1.0), Interval(-1, 1))


def quad_oracle(f, s, lo, hi):
    """mpmath tanh-sinh on every piece, split at breaks and arc centers.

    Endpoint singularities like x**-0.9 need the extra working precision.
    """
    cuts = {Fraction(lo), Fraction(hi)}
    cuts |= {b for b in f.breaks if lo < b < hi}
    cuts |= {a.center for a in f.arcs if lo < a.center < hi}
    cuts = sorted(cuts)
    with mpmath.workdps(50):
        return _quad_pieces(f, s, cuts)


def _quad_pieces(f, s, cuts):
    total = mpmath.mpf(0)
    for a, b in zip(cuts, cuts[1:]):
        mid = (a + b) / 2
        arc = f.arcs[f.segment_index(mid)]
        c, e, ctr = mpmath.mpf(arc.coeff), arc.exponent, mpmath.mpf(arc.center.numerator) / arc.center.denominator
        total += mpmath.quad(lambda x: (c * abs(x - ctr) ** e) ** s,
                             [mpmath.mpf(a.numerator) / a.denominator,
                              mpmath.mpf(b.numerator) / b.denominator])
    return float(total)


# -- examples ---------------------------------------------------------------


@pytest.mark.parametrize("arc, x, want", [
    (PowerArc(0, 1.0, 0.0), 7, 1.0),
    (PowerArc(0, 2.0, 1.0), -3, 6.0),
    (PowerArc(1, 1.0, 0.5), 5, 2.0),
])
def test_arc_eval(arc, x, want):
    assert arc_eval(arc, x) == want


def test_crossings_equal_exponents():
    got = crossings(PowerArc(0, 1.0, 1.0), PowerArc(1, 2.0, 1.0))
    # roots are float offsets from the nearer center, exact to rounding
    assert [float(x) for x in sorted(got.roots)] == pytest.approx([2 / 3, 2.0], rel=1e-15)


def test_crossings_with_constant():
    got = crossings(PowerArc(0, 1.0, 1.0), PowerArc.constant(4.0))
    assert sorted(got.roots) == [-4, 4]


def test_crossings_exponent_mismatch():
    with pytest.raises(UnsupportedExponentPair):
        crossings(PowerArc(0, 1.0, 2.0), PowerArc(1, 1.0, 1.0))


def test_pw_min_tent_pieces():
    f = tent()
    assert list(f.breaks) == [Fraction(-1, 2), Fraction(1, 2)]
    assert f.arcs[0].is_constant and f.arcs[2].is_constant
    assert f.arcs[1] == PowerArc(0, 2.0, 1.0)
    xs = np.linspace(-3, 3, 1201)
    for x in xs:
        assert pw_eval(f, x) == pytest.approx(min(1.0, 2 * abs(x)), rel=1e-12, abs=1e-300)


def test_pw_min_larger_constant_is_noop():
    f = PiecewisePowerFn.constant(1.0)
    assert pw_min(f, PowerArc.constant(3.0), Interval(-1, 1)) == f


def test_pw_min_degenerate_support_is_noop():
    f = tent()
    assert pw_min(f, PowerArc(0.3, 0.1, 1.0), Interval(0.3, 0.3)) == f


def test_extrema_examples():
    assert pw_extrema(PiecewisePowerFn.constant(1.0), Interval(-5, 5)) == (1.0, 1.0)
    assert pw_extrema(tent(), Interval(-2, 2)) == (0.0, 1.0)
    lo, hi = pw_extrema(tent(), Interval(0.1, 0.3))
    assert lo == pytest.approx(0.2, rel=1e-15) and hi == pytest.approx(0.6, rel=1e-15)


def test_integrate_power_examples():
    assert integrate_power(PiecewisePowerFn.constant(1.0), -2.0, Interval(0, 3)) == 3.0
    absx = PiecewisePowerFn.single(PowerArc(0, 1.0, 1.0))
    assert integrate_power(absx, -0.5, Interval(0, 1)) == pytest.approx(2.0, rel=1e-14)
    assert integrate_power(absx, -1.0, Interval(-1, 1)) == math.inf


def test_integrate_power_glued_tent():
    # 1 on the two outer halves, 2 * int_0^{1/2} (2x)^{-1/2} = 2 in the middle
    got = integrate_power(tent(), -0.5, Interval(-1, 1))
    assert got == pytest.approx(3.0, rel=1e-14)
    assert got == pytest.approx(quad_oracle(tent(), -0.5, -1, 1), rel=1e-8)


def test_log_corrected_examples():
    one = PiecewisePowerFn.constant(1.0)
    assert log_rbar(1.0) == 2.0
    assert integrate_log_corrected(one, 1.0, 2.0, Interval(0, 1)) == pytest.approx(0.25, rel=1e-14)
    absx = PiecewisePowerFn.single(PowerArc(0, 1.0, 1.0))
    assert integrate_log_corrected(absx, 1.0, 1.0, Interval(0, 0.5)) == math.inf
    assert integrate_log_corrected(absx, 1.0, 2.0, Interval(0, 0.5)) == pytest.approx(
        1.0 / (2.0 + math.log(2.0)), rel=1e-12)


def test_log_corrected_quadrature_oracle():
    one = PiecewisePowerFn.constant(1.0)
    # f = |x| on [0, 1/2] with theta = 3: integrand 1/(x (2 - log x)^3),
    # antiderivative 1 / (2 (2 - log x)^2)
    absx = PiecewisePowerFn.single(PowerArc(0, 1.0, 1.0))
    want = 1.0 / (2.0 * (2.0 + math.log(2.0)) ** 2)
    assert integrate_log_corrected(absx, 1.0, 3.0, Interval(0, 0.5)) == pytest.approx(want, rel=1e-8)
    assert integrate_log_corrected(one, 1.0, 3.0, Interval(0, 2)) == pytest.approx(2 / 8, rel=1e-12)
    # away from the zero, against plain quadrature: f = |x| on [1/4, 1/2]
    want = float(mpmath.quad(lambda x: 1 / (x * (2 - mpmath.log(x)) ** 3), [0.25, 0.5]))
    assert integrate_log_corrected(absx, 1.0, 3.0, Interval(0.25, 0.5)) == pytest.approx(want, rel=1e-8)


def test_log_corrected_needs_f_at_most_one():
    with pytest.raises(PreconditionViolated):
        integrate_log_corrected(PiecewisePowerFn.constant(2.0), 1.0, 2.0, Interval(0, 1))


def test_zero_set_is_centers():
    f = pw_min(tent(), PowerArc(Fraction(3, 4), 8.0, 1.0), Interval(Fraction(5, 8), Fraction(7, 8)))
    assert f.zeros() == [0, Fraction(3, 4)]


# -- properties -------------------------------------------------------------

EXPONENTS = st.sampled_from([0.5, 1.0, 2.0])


@st.composite
def bumpy(draw, max_bumps=4):
    """``(f, e)``: 1 with a few power bumps of the common exponent ``e``."""
    e = draw(EXPONENTS)
    f = PiecewisePowerFn.constant(1.0)
    for _ in range(draw(st.integers(0, max_bumps))):
        a = Fraction(draw(st.integers(-40, 40)), 20)
        half = Fraction(draw(st.integers(1, 20)), 20)
        coeff = draw(st.floats(0.5, 8.0))
        f = pw_min(f, PowerArc(a, coeff, e), Interval(a - half, a + half))
    return f, e


@settings(max_examples=40, deadline=None)
@given(bumpy(), st.integers(-40, 40), st.floats(0.2, 6.0), st.floats(0.5, 4.0))
def test_min_law(fe, a_num, coeff, half):
    f, e = fe
    a = Fraction(a_num, 20)
    support = Interval(a - Fraction(half), a + Fraction(half))
    arc = PowerArc(a, coeff, e)
    g = pw_min(f, arc, support)
    rng = np.random.default_rng(a_num + 1000)
    for x in rng.uniform(-4.5, 4.5, 400):
        x = Fraction(x)
        want = min(pw_eval(f, x), arc_eval(arc, x)) if support.contains(x) else pw_eval(f, x)
        assert pw_eval(g, x) == pytest.approx(want, rel=1e-12, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(bumpy(), st.floats(-0.9, 2.0), st.integers(-60, 0), st.integers(1, 60), st.integers(1, 60))
def test_additivity(fe, s, a, db, dc):
    f, _ = fe
    a, b, c = Fraction(a, 20), Fraction(a + db, 20), Fraction(a + db + dc, 20)
    whole = integrate_power(f, s, Interval(a, c))
    left, right = integrate_power(f, s, Interval(a, b)), integrate_power(f, s, Interval(b, c))
    if math.isinf(whole):
        assert math.isinf(left) or math.isinf(right)
    else:
        assert whole == pytest.approx(left + right, rel=1e-10)


def _singular_in(f, s, lo, hi):
    """Some piece meeting [lo, hi] in more than a point holds its own center
    in its closure and has e * s <= -1."""
    for i, arc in enumerate(f.arcs):
        if not (arc.exponent > 0 and arc.exponent * s <= -1 + 1e-12):
            continue
        a, b = f.segment_bounds(i)
        a = lo if a is None else max(a, lo)
        b = hi if b is None else min(b, hi)
        if a < b and a <= arc.center <= b:
            return True
    return False


@settings(max_examples=60, deadline=None)
@given(bumpy(), st.floats(-3.0, 1.0), st.integers(-60, 59), st.integers(1, 60))
def test_divergence_dichotomy(fe, s, a, d):
    f, _ = fe
    lo, hi = Fraction(a, 20), Fraction(a + d, 20)
    assert math.isinf(integrate_power(f, s, Interval(lo, hi))) == _singular_in(f, s, lo, hi)


def test_divergence_dichotomy_both_cases():
    f = tent()
    assert _singular_in(f, -1.0, Fraction(-1), Fraction(1))
    assert math.isinf(integrate_power(f, -1.0, Interval(-1, 1)))
    assert not _singular_in(f, -1.0, Fraction(1, 4), Fraction(1))
    assert math.isfinite(integrate_power(f, -1.0, Interval(Fraction(1, 4), 1)))


@settings(max_examples=25, deadline=None)
@given(bumpy(max_bumps=3), st.floats(-0.8, 1.5), st.integers(-60, 59), st.integers(1, 40))
def test_quadrature_oracle(fe, s, a, d):
    f, _ = fe
    if any(arc.exponent * s <= -0.9 for arc in f.arcs):
        return
    lo, hi = Fraction(a, 20), Fraction(a + d, 20)
    assert integrate_power(f, s, Interval(lo, hi)) == pytest.approx(quad_oracle(f, s, lo, hi), rel=1e-7)


@pytest.mark.parametrize("c", [0.25, 3.0, 17.0])
@pytest.mark.parametrize("e, s", [(1.0, -0.5), (0.5, 1.0), (2.0, -0.3), (1.0, 2.0)])
def test_scaling_single_arc(c, e, s):
    iv = Interval(Fraction(-1, 3), 2)
    unit = integrate_power(PiecewisePowerFn.single(PowerArc(0, 1.0, e)), s, iv)
    scaled = integrate_power(PiecewisePowerFn.single(PowerArc(0, c, e)), s, iv)
    assert scaled == pytest.approx(c**s * unit, rel=1e-12)
