import json
from fractions import Fraction

import numpy as np
import pytest

from pweak.errors import InvalidExponent, NotDifferentiable
from pweak.modulus import MeasureSpec, modulus_single
from pweak.power_arcs import Interval, PiecewisePowerFn, PowerArc
from pweak.schemas import validate
from pweak.weak_gradient import (
    LipschitzSpec,
    classify_point,
    np_complement,
    report_csv,
    weak_gradient_at,
    weak_gradient_report,
)

LEB = MeasureSpec.lebesgue()
SQRT_ATOM = MeasureSpec(PiecewisePowerFn.single(PowerArc(0, 1.0, 0.5)), ((2, 1.0),))
GAP = MeasureSpec.from_json({"density": [
    {"from": -1, "to": 0, "coeff": 1.0}, {"from": 0, "to": 1, "coeff": 0.0},
    {"from": 1, "to": 2, "coeff": 1.0}]})


def xpow(alpha):
    return MeasureSpec(PiecewisePowerFn.single(PowerArc(0, 1.0, alpha)))


def test_lipschitz_spec():
    f = LipschitzSpec((0, 1), (1.0, -2.0, 0.5), value_at_left=3.0)
    assert (f(-1), f(0), f(0.5), f(1), f(3)) == (2.0, 3.0, 2.0, 1.0, 2.0)
    assert f.lipschitz_constant == 2.0
    assert f.derivative(0.5) == -2.0
    with pytest.raises(NotDifferentiable):
        f.derivative(1)
    obj = json.loads(json.dumps(f.to_json()))
    validate(obj, "lipschitz")
    assert LipschitzSpec.from_json(obj) == f
    with pytest.raises(ValueError):
        LipschitzSpec((0, 1), (1.0,))
    with pytest.raises(ValueError):
        LipschitzSpec((1, 0), (1.0, 1.0, 1.0))


def test_kink_with_equal_slopes_is_fine():
    assert LipschitzSpec((0,), (2.0, 2.0)).derivative(0) == 2.0


def test_classify_examples():
    for p in (1.01, 2.0, 9.0):
        for x in (-3, 0, 0.5):
            assert classify_point(LEB, p, x).in_Np
    for alpha in (0.5, 1.0, 2.0):
        mu = xpow(alpha)
        for p in (1.1, 1 + alpha, 1 + alpha + 1e-6, 5.0):
            assert classify_point(mu, p, 0).in_Np == (p > 1 + alpha)
            assert classify_point(mu, p, 0.5).in_Np


def test_classify_zero_segment_closure():
    for x in (0, 0.5, 1):
        assert not classify_point(GAP, 2.0, x).in_Np
    assert classify_point(GAP, 2.0, -0.01).in_Np and classify_point(GAP, 2.0, 1.01).in_Np


def test_invalid_p():
    with pytest.raises(InvalidExponent):
        classify_point(LEB, 1.0, 0)
    with pytest.raises(InvalidExponent):
        np_complement(LEB, 0.5, Interval(0, 1))


def test_np_complement_examples(seq50):
    mu = MeasureSpec(seq50.final)
    rep = np_complement(mu, 1.5, Interval(0, 1))
    assert sorted(rep.locations) == sorted(seq50.centers) and not rep.subintervals
    assert all(p <= t for p, (_, _, t) in zip([1.5] * len(rep.points), rep.points))
    assert np_complement(mu, 3.0, Interval(0, 1)).empty
    gap = np_complement(GAP, 4.0, Interval(-1, 2))
    assert gap.subintervals == [Interval(0, 1)] and not gap.points
    half = np_complement(mu, 1.5, Interval(0, Fraction(1, 2)))
    assert sorted(half.locations) == sorted(q for q in seq50.centers if q <= Fraction(1, 2))
    validate(json.loads(json.dumps(rep.to_json())), "np")


def test_p_monotone(seq50):
    mu = MeasureSpec(seq50.final)
    ps = [1.1, 1.5, 1.9, 2.0, 2.0001, 2.5, 4.0]
    sets = [set(np_complement(mu, p, Interval(0, 1)).locations) for p in ps]
    assert all(b <= a for a, b in zip(sets, sets[1:]))
    mixed = MeasureSpec(PiecewisePowerFn.from_pieces(
        [(Fraction(1, 2), PowerArc(0, 1.0, 0.5)), (None, PowerArc(1, 2 ** -0.5 / 2 ** -2.0, 2.0))]))
    sets = [set(np_complement(mixed, p, Interval(-1, 2)).locations) for p in (1.2, 2.0, 3.0, 3.5)]
    assert sets[0] == {0, 1} and sets[1] == {1} and sets[3] == set()
    assert all(b <= a for a, b in zip(sets, sets[1:]))


def test_gradient_examples():
    f = LipschitzSpec.linear(3.0)
    assert weak_gradient_at(LEB, 1.7, LipschitzSpec.linear(1.0), 0.3) == 1.0
    assert weak_gradient_at(SQRT_ATOM, 2.0, f, 0) == 3.0
    assert weak_gradient_at(SQRT_ATOM, 2.0, f, 2) == 0.0
    assert weak_gradient_at(SQRT_ATOM, 2.0, f, 1) == 3.0
    assert weak_gradient_at(SQRT_ATOM, 1.3, f, 0) == 0.0


def test_gradient_kink_surfaced():
    f = LipschitzSpec((Fraction(1, 2),), (1.0, -1.0))
    with pytest.raises(NotDifferentiable):
        weak_gradient_at(LEB, 2.0, f, Fraction(1, 2))
    # off N_p the kink is irrelevant
    assert weak_gradient_at(GAP, 2.0, LipschitzSpec((Fraction(1, 2),), (1.0, -1.0)), Fraction(1, 2)) == 0.0


def test_report_rows():
    rows = weak_gradient_report(SQRT_ATOM, 2.0, LipschitzSpec.linear(3.0), Interval(0, 2), 3)
    assert [(float(x), a, b, g) for x, a, b, g in rows] == [
        (0.0, True, False, 3.0), (1.0, True, False, 3.0), (2.0, True, True, 0.0)]
    low = weak_gradient_report(SQRT_ATOM, 1.3, LipschitzSpec.linear(3.0), Interval(0, 2), 3)
    assert low[0][1:] == (False, False, 0.0)
    assert report_csv(rows).splitlines() == ["x,in_Np,is_atom,grad", "0,true,false,3",
                                             "1,true,false,3", "2,true,true,0"]


def test_report_skips_kinks():
    f = LipschitzSpec((Fraction(1, 2),), (1.0, -1.0))
    rows = weak_gradient_report(LEB, 2.0, f, Interval(0, 1), 5)
    assert [x for x, *_ in rows] == [0, Fraction(1, 4), Fraction(3, 4), 1]


def test_dichotomy_and_lebesgue_base():
    f = LipschitzSpec((-0.5, 0.25, 1.5), (2.0, -1.0, 0.5, 3.0))
    rng = np.random.default_rng(0)
    for x in rng.uniform(-1, 2, 300):
        d = abs(f.derivative(x))
        assert weak_gradient_at(LEB, 2.0, f, x) == d
        for mu in (SQRT_ATOM, GAP):
            for p in (1.2, 2.0):
                assert weak_gradient_at(mu, p, f, x) in (0.0, d)


def test_modulus_consistency(seq50):
    mu = MeasureSpec(seq50.final)
    qs = seq50.centers
    rng = np.random.default_rng(7)
    probes = [Fraction(x) for x in rng.uniform(0.01, 0.99, 70)] + list(rng.choice(qs, 30))
    checked = 0
    for x in probes:
        for eps in (Fraction(1, 100), Fraction(1, 1000)):
            if any(q != x and abs(q - x) <= eps for q in qs):
                continue
            iv = Interval(x - eps, x + eps)
            for p in (1.5, 2.0, 3.0):
                assert classify_point(mu, p, x).in_Np == (modulus_single(mu, iv, p) > 0)
                checked += 1
    assert checked > 100
