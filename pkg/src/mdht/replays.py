"""Closed-form replays of the recursion inequalities and constant choices
behind the cover-tree bounds.

Each replay unrolls one named recursive estimate with explicit base
cases, in the same round-up arithmetic the certificate engine uses, so
engine-built certificates can be compared bit for bit on matching
instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .roundup import up_add, up_mul, up_sqrt


def replay_curve_recursion(n: int, d: int) -> float:
    """Pair-cover recursion for sets on a curve of crossing degree d:
    value(N) = value(ceil(N/2)) + 3 sqrt(d), base value(1) = 1."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    value = 1.0
    step = up_mul(up_sqrt(float(d)), up_add(2.0, 1.0))
    k = n
    while k > 1:
        value = up_add(value, step)
        k = -(-k // 2)
    return value


@dataclass
class ProductReplay:
    value: float
    closed_constant: float
    bound_ok: bool


def replay_product_recursion(r: int) -> ProductReplay:
    """Equal-cardinality planar product recursion:
    value(2^r) = value(2^(r-1)) + 5 * 2^(r/2), base value(1) = 1.

    Also reports the closed constant C = 5 / (1 - 2^(-1/2)) and whether
    the unrolled value stays below C * 2^(r/2) at every level.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    closed_c = 5.0 / (1.0 - 2.0 ** (-0.5))
    value = 1.0
    ok = value <= closed_c
    for level in range(1, r + 1):
        value = up_add(value, up_mul(up_sqrt(float(2**level)), up_add(4.0, 1.0)))
        ok = ok and value <= closed_c * 2.0 ** (level / 2.0)
    return ProductReplay(value=value, closed_constant=closed_c, bound_ok=ok)


@dataclass
class AlgebraicReplay:
    value: float
    floor: int
    steps: int
    conditional_on_c: bool = True


def replay_algebraic_recursion(n: int, d: int, c: float = 1.0 / 16.0) -> AlgebraicReplay:
    """Halving recursion for planar algebraic sets of degree d:
    value(N) = value(ceil(N/2)) + 5 sqrt(d) while N stays at or above the
    feasibility floor ceil(d^2 / c); below the floor the trivial bound N
    is used as the base.  The constant c is an input parameter; outputs
    are conditional on it.
    """
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    if not 0 < c <= 1:
        raise ValueError("c must lie in (0, 1]")
    floor = max(1, math.ceil(d * d / c))
    step = up_mul(up_sqrt(float(d)), 5.0)
    k = n
    steps = 0
    while k >= floor and k > 1:
        k = -(-k // 2)
        steps += 1
    value = float(k)
    for _ in range(steps):
        value = up_add(value, step)
    return AlgebraicReplay(value=value, floor=floor, steps=steps)


@dataclass
class ConstantChoices:
    c: float
    c0: float
    c0_sq: float
    big_c0: float
    a_min: float
    lower_bounds: tuple


def replay_thm3d_constants(a1: float, a2: float) -> ConstantChoices:
    """Replay of the constant bookkeeping that closes the degree-d planar
    induction: c strictly below 1/(8 a2) (half of it), c0 from
    8^4 a1 c0^2 = c, C0 = 2 (a1 c0^-2 + 1), and the final constant floor
    a_min = max(2 a1 c0^-2, 5/log 2, C0)."""
    if a1 <= 0 or a2 <= 0:
        raise ValueError("a1 and a2 must be positive")
    c = 1.0 / (16.0 * a2)
    c0_sq = c / (8.0**4 * a1)
    c0 = math.sqrt(c0_sq)
    lower = (2.0 * a1 / c0_sq, 5.0 / math.log(2.0), 2.0 * (a1 / c0_sq + 1.0))
    return ConstantChoices(
        c=c,
        c0=c0,
        c0_sq=c0_sq,
        big_c0=lower[2],
        a_min=max(lower),
        lower_bounds=lower,
    )


@dataclass
class InductionStep:
    omega_n: float
    d0: float
    component_bound: float
    per_cell_bound: float
    contraction: float
    contraction_ok: bool
    epsilon_ok: bool
    base_ok: bool


def replay_3dgen_step(n: int, h, a1: float, a: float, eps: float) -> InductionStep:
    """Arithmetic of one induction step of the slowly-growing-factor bound.

    h is the growth function (callable); conditions on (N, eps) are
    checked and the violated one is named on failure.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    log_n = math.log(n)
    omega_n = h(n) / log_n
    conditions = {
        "omega(N) <= eps": omega_n <= eps,
        "N omega(N)^4 > 1/eps": n * omega_n**4 > 1.0 / eps,
        "h(N) > 1/eps": h(n) > 1.0 / eps,
        "h((log N)^4) < eps h(N)": h(log_n**4) < eps * h(n),
    }
    failed = [name for name, ok in conditions.items() if not ok]
    if failed:
        raise ValueError("induction step preconditions violated: " + "; ".join(failed))
    d0 = math.sqrt(n) * omega_n**2
    contraction = a1**0.25 * eps + 4.0 * a1**0.25 * eps
    return InductionStep(
        omega_n=omega_n,
        d0=d0,
        component_bound=a1 * d0**2,
        per_cell_bound=a1 * omega_n**-4,
        contraction=contraction,
        contraction_ok=contraction < 0.5,
        epsilon_ok=10.0 * a1**0.25 * eps < 1.0,
        base_ok=n <= a * n**0.25 * h(n),
    )
