"""Finite direction-set families and their exact-rational constructions.

A direction set is a finite collection of points v in R^n; each point
parametrizes the spatial direction <v, 1> in R^(n+1).  Coordinates are
exact rationals so that all geometric sign predicates downstream are
unambiguous; conversion to floating point happens only at the spectral
boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iter_product

from .rational import as_fraction, format_fraction

# Hard cap on schedule integers; beyond this the construction reports
# infeasibility instead of silently losing exactness.
MACHINE_CAP = 2**62


@dataclass(frozen=True)
class DirectionSet:
    """Finite set of rational points in R^dim, in a fixed list order."""

    dim: int
    points: tuple
    label: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        pts = tuple(tuple(as_fraction(c) for c in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        for p in pts:
            if len(p) != self.dim:
                raise ValueError(f"point {p} does not have {self.dim} coordinates")
        if len(set(pts)) != len(pts):
            raise ValueError("points must be pairwise distinct")

    def __len__(self):
        return len(self.points)

    def __contains__(self, point):
        return tuple(as_fraction(c) for c in point) in set(self.points)

    def as_set(self):
        return frozenset(self.points)

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "label": self.label,
            "points": [[format_fraction(c) for c in p] for p in self.points],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "DirectionSet":
        return cls(
            dim=int(d["dim"]),
            points=tuple(tuple(Fraction(c) for c in p) for p in d["points"]),
            label=d.get("label", ""),
        )

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "DirectionSet":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


@dataclass(frozen=True)
class GrowthSchedule:
    """Increasing (M_N, R_N) pairs tied by the log-power sandwich.

    Each entry satisfies (1/2)(log R)^alpha <= log M <= (log R)^alpha,
    with the M_N strictly increasing and each dividing the next, and the
    R_N strictly increasing.
    """

    alpha: float
    entries: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not 0.5 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [1/2, 1]")
        object.__setattr__(self, "entries", tuple((int(m), int(r)) for m, r in self.entries))
        self.validate()

    def validate(self):
        prev_m, prev_r = None, None
        for m, r in self.entries:
            if m < 2 or r < 2:
                raise ValueError("schedule entries must have M, R >= 2")
            if not sandwich_holds(self.alpha, m, r):
                raise ValueError(f"entry (M={m}, R={r}) violates the log sandwich")
            if prev_m is not None:
                if not (m > prev_m and m % prev_m == 0):
                    raise ValueError("M values must strictly increase and divide successors")
                if not r > prev_r:
                    raise ValueError("R values must strictly increase")
            prev_m, prev_r = m, r


def sandwich_holds(alpha: float, m: int, r: int) -> bool:
    lr = math.log(r)
    lm = math.log(m)
    return 0.5 * lr**alpha <= lm <= lr**alpha


def uniform(m: int, label: str | None = None) -> DirectionSet:
    """The set {j/m : 1 <= j <= m} of m equally spaced points in (0, 1]."""
    if m < 1:
        raise ValueError("m must be >= 1")
    pts = tuple((Fraction(j, m),) for j in range(1, m + 1))
    return DirectionSet(1, pts, label if label is not None else f"uniform({m})")


def product(factors, label: str | None = None) -> DirectionSet:
    """Cartesian product of one-dimensional direction sets, factor order kept."""
    factors = list(factors)
    if not factors:
        raise ValueError("product requires at least one factor")
    for f in factors:
        if f.dim != 1:
            raise ValueError("product factors must be one-dimensional")
    pts = tuple(
        tuple(c for p in combo for c in p)
        for combo in iter_product(*(f.points for f in factors))
    )
    if label is None:
        label = " x ".join(f.label or "?" for f in factors)
    return DirectionSet(len(factors), pts, label)


def lacunary_uniform(r: int, m: int, label: str | None = None) -> DirectionSet:
    """Union over j <= r of the block 2^-j + 2^-j * uniform(m).

    Duplicate points arising from the union are merged; the result is
    reported as a plain set in deterministic (scale-major) order.
    """
    if r < 1 or m < 1:
        raise ValueError("r and m must be >= 1")
    seen = {}
    for j in range(1, r + 1):
        scale = Fraction(1, 2**j)
        for k in range(1, m + 1):
            val = scale + scale * Fraction(k, m)
            seen.setdefault(val, None)
    pts = tuple((v,) for v in seen)
    if label is None:
        label = f"lacunary_uniform(R={r}, M={m})"
    return DirectionSet(1, pts, label)


def lacunary_blocks(omega: DirectionSet) -> dict[int, list]:
    """Group a 1-d set with coordinates in (0, 1] into dyadic blocks.

    Block j collects the points in (2^-j, 2^-(j-1)], j >= 1.
    """
    if omega.dim != 1:
        raise ValueError("dyadic blocks are defined for one-dimensional sets")
    blocks: dict[int, list] = {}
    for (v,) in omega.points:
        if not 0 < v <= 1:
            raise ValueError("dyadic block structure needs coordinates in (0, 1]")
        j = 1
        while v <= Fraction(1, 2**j):
            j += 1
        blocks.setdefault(j, []).append(v)
    return {j: sorted(vals) for j, vals in sorted(blocks.items())}


def growth_schedule(alpha: float, count: int) -> GrowthSchedule:
    """Greedy smallest-valid schedule of (M_N, R_N) pairs.

    M_N is chosen as the smallest multiple of M_{N-1} for which an
    admissible R_N exists, then R_N as the smallest admissible value.
    Raises if the requested count cannot be met below the machine cap.
    """
    if not 0.5 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [1/2, 1]")
    if count < 1:
        raise ValueError("count must be >= 1")
    entries = []
    m_prev, r_prev = 1, 1
    for _ in range(count):
        m = m_prev * 2 if entries else 2
        placed = False
        while m <= MACHINE_CAP:
            lm = math.log(m)
            r_lo = max(r_prev + 1, math.ceil(math.exp(lm ** (1.0 / alpha))))
            r_hi = min(MACHINE_CAP, math.floor(math.exp(min(700.0, (2 * lm) ** (1.0 / alpha)))))
            r = r_lo
            while r <= r_hi and not sandwich_holds(alpha, m, r):
                r += 1
            if r <= r_hi:
                entries.append((m, r))
                m_prev, r_prev = m, r
                placed = True
                break
            m += m_prev if entries else 1
        if not placed:
            raise ValueError(
                f"growth schedule infeasible at entry {len(entries) + 1}: "
                f"no (M, R) under the machine cap {MACHINE_CAP}"
            )
    return GrowthSchedule(alpha, tuple(entries))


def prescribed_growth_product(n: int, alpha: float, beta: float, big_n: int) -> DirectionSet:
    """Product U_{N1} x U_{N2}^(n-1) realizing growth rate N^alpha (log N)^beta.

    N1 and N2 are the smallest integers within a factor 2 of the target
    sizes; the construction requires big_n large enough that
    N^((n-1)/(2n) - alpha) > 4^((n-1)/(2n)) (log N)^(beta-1).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    exp_cap = (n - 1) / (2 * n)
    if not 0 < alpha < exp_cap:
        raise ValueError(f"alpha must lie in (0, {exp_cap})")
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if big_n < 3:
        raise ValueError("N must be >= 3")
    log_n = math.log(big_n)
    lhs = big_n ** (exp_cap - alpha)
    rhs = 4**exp_cap * log_n ** (beta - 1)
    if not lhs > rhs:
        raise ValueError(
            "N below feasibility threshold: requires "
            f"N^({exp_cap - alpha:.4f}) > 4^{exp_cap:.4f} (log N)^({beta - 1:.4f}), "
            f"got {lhs:.6g} <= {rhs:.6g}"
        )
    t1 = big_n ** (1 - 2 * alpha) * log_n ** (2 * (1 - beta))
    t2 = big_n ** (2 * alpha / (n - 1)) * log_n ** (2 * (beta - 1) / (n - 1))
    n1 = max(1, math.ceil(t1 / 2))
    n2 = max(1, math.ceil(t2 / 2))
    for name, val, target in (("N1", n1, t1), ("N2", n2, t2)):
        if not val / 2 <= target <= 2 * val:
            raise ValueError(
                f"no integer {name} satisfies {name}/2 <= {target:.6g} <= 2 {name}; "
                "increase N"
            )
    total = n1 * n2 ** (n - 1)
    if not big_n / 2**n <= total <= 2**n * big_n:
        raise ValueError(
            f"constructed cardinality {total} falls outside [N/2^n, 2^n N]"
        )
    factors = [uniform(n1)] + [uniform(n2)] * (n - 1)
    return product(
        factors,
        label=f"prescribed(n={n}, alpha={alpha}, beta={beta}, N={big_n}) = "
        f"U_{n1} x U_{n2}^{n - 1}",
    )


def boustrophedon_curve_samples(m: int) -> tuple[DirectionSet, int]:
    """U_m^2 ordered along a serpentine polyline, plus its crossing bound.

    Points are listed row by row at heights j/m, alternating the traversal
    direction so consecutive points are polyline neighbours.  Any line that
    is not horizontal or vertical crosses the polyline at most m times, so
    the certified crossing degree is m.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    pts = []
    for j in range(1, m + 1):
        xs = range(1, m + 1) if j % 2 == 1 else range(m, 0, -1)
        for i in xs:
            pts.append((Fraction(i, m), Fraction(j, m)))
    ds = DirectionSet(2, tuple(pts), label=f"boustrophedon({m})")
    return ds, m


def affine_image(omega: DirectionSet, c, w) -> DirectionSet:
    """Componentwise map v -> (c_1 v_1 + w_1, ..., c_n v_n + w_n), c_i > 0."""
    c = [as_fraction(x) for x in c]
    w = [as_fraction(x) for x in w]
    if len(c) != omega.dim or len(w) != omega.dim:
        raise ValueError("c and w must match the set dimension")
    if any(x <= 0 for x in c):
        raise ValueError("all dilation factors must be positive")
    pts = tuple(
        tuple(ci * vi + wi for ci, vi, wi in zip(c, p, w)) for p in omega.points
    )
    return DirectionSet(omega.dim, pts, label=f"affine({omega.label})")


def embed_slice(omega: DirectionSet, w) -> DirectionSet:
    """Extend every point by the fixed tail w, raising the dimension by len(w)."""
    w = tuple(as_fraction(x) for x in w)
    if not w:
        return omega
    pts = tuple(p + w for p in omega.points)
    return DirectionSet(omega.dim + len(w), pts, label=f"slice({omega.label})")
