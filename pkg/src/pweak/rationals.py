"""Deterministic enumeration of rationals via the Calkin-Wilf sequence."""

from __future__ import annotations

from fractions import Fraction
from itertools import islice
from typing import Iterator

from .power_arcs import Interval, as_point


def calkin_wilf() -> Iterator[Fraction]:
    """Positive rationals in breadth-first Calkin-Wilf order: 1, 1/2, 2, 1/3, ..."""
    x = Fraction(1)
    while True:
        yield x
        # Newman's successor formula
        x = 1 / (2 * (x.numerator // x.denominator) - x + 1)


def signed_rationals() -> Iterator[Fraction]:
    """All rationals: 0, then each Calkin-Wilf term followed by its negative."""
    yield Fraction(0)
    for x in calkin_wilf():
        yield x
        yield -x


def unit_rationals() -> Iterator[Fraction]:
    """The rationals of ``signed_rationals`` lying in the open interval (0, 1)."""
    return (x for x in signed_rationals() if 0 < x < 1)


def enumerate_rationals(window: Interval, count: int) -> list:
    """First ``count`` distinct rationals inside the open ``window``.

    Rationals in (0, 1) are taken in traversal order and pushed through the
    affine map onto the window, so the window never has to be searched for.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    lo, hi = as_point(window.lo), as_point(window.hi)
    if not lo < hi:
        raise ValueError("window must be nondegenerate")
    width = hi - lo
    return [lo + width * t for t in islice(unit_rationals(), count)]
