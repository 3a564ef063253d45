"""Cells, covers of direction sets, and exact hyperplane sign tests.

All geometry is exact rational.  A cell is connected by construction:
an open interval/box/convex polygon, a closed polyline arc, or a point.
Cells produced as complement components of cut lines are open; members
that fall on a cut boundary still belong to the cell's closure, which is
what the covering invariant requires.  Stabbing statistics computed from
these semantics bound the almost-everywhere stabbing count, which is the
quantity the certifier consumes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .directions import DirectionSet
from .rational import as_fraction, format_fraction

CELL_KINDS = ("interval", "convex-polygon", "box", "curve-arc", "point")


@dataclass(frozen=True)
class HyperplaneParam:
    """Unnormalized coefficient vector u: P_u(y) = u . <y, 1>.

    The zero set is scale-invariant, so u is stored as given (integers or
    rationals) instead of being normalized to the sphere.
    """

    u: tuple

    def __post_init__(self):
        u = tuple(as_fraction(c) for c in self.u)
        if all(c == 0 for c in u):
            raise ValueError("u must be nonzero")
        object.__setattr__(self, "u", u)

    @property
    def ambient_dim(self) -> int:
        return len(self.u) - 1

    def value(self, point) -> Fraction:
        acc = self.u[-1]
        for c, x in zip(self.u, point):
            acc += c * as_fraction(x)
        return acc


@dataclass(frozen=True)
class Cell:
    """One connected cell of a cover, with its member indices into omega."""

    kind: str
    geometry: tuple
    members: tuple
    open: bool = True

    def __post_init__(self):
        if self.kind not in CELL_KINDS:
            raise ValueError(f"kind must be one of {CELL_KINDS}")
        geo = tuple(tuple(as_fraction(c) for c in pt) for pt in self.geometry)
        object.__setattr__(self, "geometry", geo)
        object.__setattr__(self, "members", tuple(int(i) for i in self.members))
        if not geo:
            raise ValueError("cell needs geometry data")
        if self.kind == "point":
            if len(geo) != 1:
                raise ValueError("point cell has exactly one vertex")
            object.__setattr__(self, "open", False)
        if self.kind == "curve-arc":
            object.__setattr__(self, "open", False)
        if self.kind == "interval" and (len(geo) != 2 or len(geo[0]) != 1):
            raise ValueError("interval cell needs two 1-d endpoints")
        if self.kind == "box" and len(geo) != 2:
            raise ValueError("box cell is stored as (min corner, max corner)")

    @property
    def dim(self) -> int:
        return len(self.geometry[0])

    def vertices(self) -> list:
        """The finite vertex set whose P_u signs decide hyperplane hits."""
        if self.kind == "box":
            lo, hi = self.geometry
            corners = [()]
            for a, b in zip(lo, hi):
                corners = [c + (x,) for c in corners for x in ((a,) if a == b else (a, b))]
            return corners
        return list(self.geometry)

    def contains(self, point, closure: bool = True) -> bool:
        """Exact membership; closure=True tests the closed cell."""
        p = tuple(as_fraction(c) for c in point)
        if self.kind == "point":
            return p == self.geometry[0]
        if self.kind == "interval":
            (lo,), (hi,) = self.geometry
            return lo <= p[0] <= hi if closure else lo < p[0] < hi
        if self.kind == "box":
            lo, hi = self.geometry
            if closure:
                return all(a <= x <= b for a, x, b in zip(lo, p, hi))
            return all(a < x < b for a, x, b in zip(lo, p, hi))
        if self.kind == "convex-polygon":
            return _polygon_contains(self.geometry, p, closure)
        if self.kind == "curve-arc":
            pts = self.geometry
            if len(pts) == 1:
                return p == pts[0]
            return any(_on_segment(a, b, p) for a, b in zip(pts, pts[1:]))
        raise AssertionError(self.kind)


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list:
    """CCW convex hull of exact-rational planar points (monotone chain)."""
    pts = sorted(set(tuple(as_fraction(c) for c in p) for p in points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _polygon_contains(verts, p, closure: bool) -> bool:
    # verts in CCW order
    m = len(verts)
    if m == 1:
        return closure and p == verts[0]
    if m == 2:
        return closure and _on_segment(verts[0], verts[1], p)
    for i in range(m):
        s = _cross(verts[i], verts[(i + 1) % m], p)
        if s < 0 or (not closure and s == 0):
            return False
    return True


def _on_segment(a, b, p) -> bool:
    """Exact membership of p in the closed segment [a, b], any dimension."""
    if a == b:
        return p == a
    axis = next(k for k in range(len(a)) if a[k] != b[k])
    t = (p[axis] - a[axis]) / (b[axis] - a[axis])
    if not 0 <= t <= 1:
        return False
    return all(p[k] == a[k] + t * (b[k] - a[k]) for k in range(len(a)))


def cell_hits_hyperplane(cell: Cell, u: HyperplaneParam) -> bool:
    """Exact sign test for whether Z(P_u) meets the cell.

    Convex cells straddle (strictly for open cells); polyline arcs are hit
    when some consecutive breakpoint pair straddles or touches; a point
    cell is hit exactly when it lies on the hyperplane.
    """
    vals = [u.value(v) for v in cell.vertices()]
    if cell.kind == "point":
        return vals[0] == 0
    if cell.kind == "curve-arc":
        if len(vals) == 1:
            return vals[0] == 0
        return any(a * b <= 0 for a, b in zip(vals, vals[1:]))
    lo, hi = min(vals), max(vals)
    if cell.open:
        return lo < 0 < hi
    return lo <= 0 <= hi


@dataclass(frozen=True)
class CellCover:
    """Cover of a direction set by cells, with one representative per cell."""

    omega: DirectionSet
    cells: tuple
    representatives: tuple

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "representatives", tuple(int(i) for i in self.representatives))
        if len(self.representatives) != len(self.cells):
            raise ValueError("exactly one representative per cell")
        self.validate()

    def validate(self):
        covered = set()
        for cell, rep in zip(self.cells, self.representatives):
            if rep not in cell.members:
                raise ValueError("representative must be a member of its cell")
            for idx in cell.members:
                if not 0 <= idx < len(self.omega):
                    raise ValueError("member index out of range")
                if not cell.contains(self.omega.points[idx], closure=True):
                    raise ValueError(
                        f"member {self.omega.points[idx]} outside cell closure"
                    )
            covered.update(cell.members)
        if covered != set(range(len(self.omega))):
            raise ValueError("cells must cover every point of omega")

    @property
    def dim(self) -> int:
        return self.omega.dim

    def representative_set(self, label: str = "") -> DirectionSet:
        pts = tuple(self.omega.points[i] for i in self.representatives)
        return DirectionSet(self.omega.dim, pts, label or f"reps({self.omega.label})")

    def member_sets(self) -> list:
        out = []
        for cell in self.cells:
            pts = tuple(self.omega.points[i] for i in cell.members)
            out.append(DirectionSet(self.omega.dim, pts))
        return out

    # ------------------------------------------------------------- file IO

    def to_json_dict(self) -> dict:
        return {
            "omega": self.omega.to_json_dict(),
            "cells": [
                {
                    "kind": c.kind,
                    "open": c.open,
                    "geometry": [[format_fraction(x) for x in pt] for pt in c.geometry],
                    "members": list(c.members),
                    "representative": rep,
                }
                for c, rep in zip(self.cells, self.representatives)
            ],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CellCover":
        omega = DirectionSet.from_json_dict(d["omega"])
        cells = []
        reps = []
        for c in d["cells"]:
            cells.append(
                Cell(
                    kind=c["kind"],
                    geometry=tuple(tuple(Fraction(x) for x in pt) for pt in c["geometry"]),
                    members=tuple(c["members"]),
                    open=bool(c.get("open", True)),
                )
            )
            reps.append(int(c["representative"]))
        return cls(omega, tuple(cells), tuple(reps))

    def save(self, path, extra: dict | None = None):
        d = self.to_json_dict()
        if extra:
            d.update(extra)
        with open(path, "w") as fh:
            json.dump(d, fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "CellCover":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


# ------------------------------------------------------------- constructors

def _axis_values(omega: DirectionSet):
    """Sorted unique per-axis coordinates, or None when omega is not a
    full Cartesian product."""
    axes = [sorted(set(p[k] for p in omega.points)) for k in range(omega.dim)]
    expect = 1
    for vals in axes:
        expect *= len(vals)
    if expect != len(omega):
        return None
    pts = set(omega.points)
    # spot check: full product must contain every combination
    from itertools import product as iproduct

    if expect <= 4096:
        for combo in iproduct(*axes):
            if combo not in pts:
                return None
    return axes


def _chunk_counts(n: int, size: int) -> list:
    """Split n items into ceil(n/size) consecutive chunks of balanced sizes."""
    count = -(-n // size)
    base, extra = divmod(n, count)
    return [base + 1] * extra + [base] * (count - extra)


def grid_cover_for_product(omega: DirectionSet, group_sizes) -> CellCover:
    """Axis-parallel open boxes over consecutive per-axis groups.

    Group boundaries are midpoints between consecutive axis values;
    unbounded end intervals are clipped to a box at twice the extent.
    """
    axes = _axis_values(omega)
    if axes is None:
        raise ValueError("omega is not a Cartesian product")
    group_sizes = list(group_sizes)
    if len(group_sizes) != omega.dim:
        raise ValueError("need one group size per axis")
    axis_intervals = []
    for vals, g in zip(axes, group_sizes):
        if g < 1:
            raise ValueError("group sizes must be >= 1")
        span = vals[-1] - vals[0] if len(vals) > 1 else Fraction(1)
        lo_clip = vals[0] - span / 2 - 1
        hi_clip = vals[-1] + span / 2 + 1
        counts = _chunk_counts(len(vals), g)
        bounds = [lo_clip]
        idx = 0
        for c in counts[:-1]:
            idx += c
            bounds.append((vals[idx - 1] + vals[idx]) / 2)
        bounds.append(hi_clip)
        groups = []
        idx = 0
        for i, c in enumerate(counts):
            groups.append(((bounds[i], bounds[i + 1]), vals[idx:idx + c]))
            idx += c
        axis_intervals.append(groups)

    index_of = {p: i for i, p in enumerate(omega.points)}
    cells = []
    reps = []
    from itertools import product as iproduct

    for combo in iproduct(*axis_intervals):
        lo = tuple(iv[0][0] for iv in combo)
        hi = tuple(iv[0][1] for iv in combo)
        members = tuple(
            sorted(index_of[pt] for pt in iproduct(*(iv[1] for iv in combo)))
        )
        cells.append(Cell("box", (lo, hi), members, open=True))
        reps.append(members[0])
    return CellCover(omega, tuple(cells), tuple(reps))


def interval_cover_1d(omega: DirectionSet, group_size: int) -> CellCover:
    """Disjoint open intervals around consecutive groups of a 1-d set."""
    if omega.dim != 1:
        raise ValueError("interval covers need a one-dimensional set")
    order = sorted(range(len(omega)), key=lambda i: omega.points[i][0])
    vals = [omega.points[i][0] for i in order]
    span = vals[-1] - vals[0] if len(vals) > 1 else Fraction(1)
    counts = _chunk_counts(len(vals), group_size)
    cells = []
    reps = []
    idx = 0
    for c in counts:
        chunk = order[idx:idx + c]
        lo = vals[idx] - 1 if idx == 0 else (vals[idx - 1] + vals[idx]) / 2
        hi = (
            vals[idx + c - 1] + span / 2 + 1
            if idx + c == len(vals)
            else (vals[idx + c - 1] + vals[idx + c]) / 2
        )
        if idx == 0:
            lo = vals[0] - span / 2 - 1
        cells.append(Cell("interval", ((lo,), (hi,)), tuple(chunk), open=True))
        reps.append(chunk[0])
        idx += c
    return CellCover(omega, tuple(cells), tuple(reps))


def curve_cover(samples: DirectionSet, pair_size: int) -> CellCover:
    """Closed polyline arcs over consecutive groups of curve-ordered samples.

    The list order of the samples is taken as the curve parameter order.
    """
    if pair_size < 1:
        raise ValueError("pair_size must be >= 1")
    if len(samples) < 1:
        raise ValueError("need at least one sample")
    cells = []
    reps = []
    n = len(samples)
    idx = 0
    counts = _chunk_counts(n, pair_size)
    for c in counts:
        chunk = list(range(idx, idx + c))
        geo = tuple(samples.points[i] for i in chunk)
        cells.append(Cell("curve-arc", geo, tuple(chunk), open=False))
        reps.append(chunk[0])
        idx += c
    return CellCover(samples, tuple(cells), tuple(reps))
