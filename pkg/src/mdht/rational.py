"""Exact rational coordinate helpers shared across modules."""

from __future__ import annotations

from fractions import Fraction
from math import lcm


def as_fraction(x) -> Fraction:
    """Convert ints, floats, strings like '3/4', and Fractions exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def clear_denominators(weights) -> list[int]:
    """Scale a list of Fractions by their common denominator to integers.

    The result has the same signs and sign-zero pattern as the input for
    every integer linear combination, since the scale factor is positive.
    """
    weights = [as_fraction(w) for w in weights]
    scale = lcm(*(w.denominator for w in weights)) if weights else 1
    return [int(w * scale) for w in weights]
