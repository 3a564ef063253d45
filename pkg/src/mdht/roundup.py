"""Floating-point arithmetic rounded toward +infinity.

Certificate values are upper bounds, so every arithmetic node must err
upward.  Each operation computes the IEEE round-to-nearest result and
bumps it one ulp exactly when the true value (checked in exact rational
arithmetic) exceeds it; integer-exact operations stay bit-exact.
"""

from __future__ import annotations

import math
from fractions import Fraction


def up_add(a: float, b: float) -> float:
    s = a + b
    if Fraction(s) < Fraction(a) + Fraction(b):
        return math.nextafter(s, math.inf)
    return s


def up_mul(a: float, b: float) -> float:
    p = a * b
    if Fraction(p) < Fraction(a) * Fraction(b):
        return math.nextafter(p, math.inf)
    return p


def up_sqrt(x: float) -> float:
    s = math.sqrt(x)
    if Fraction(s) * Fraction(s) < Fraction(x):
        return math.nextafter(s, math.inf)
    return s
