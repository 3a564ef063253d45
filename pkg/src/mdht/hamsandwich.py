"""Exact planar ham-sandwich cuts and an iterated line partitioner.

ham_sandwich_line finds, in exact rational arithmetic, a line leaving at
most ceil(|A|/2) points of A strictly on each open side and likewise for
B (points on the line count to neither side).  Some valid line passes
through two input points: any valid line can be translated until it
touches a point and rotated about it until it touches a second, with no
strict-side count ever increasing.  It therefore suffices to scan the
finitely many point-pair lines.

partition_points_2d applies such cuts round by round, one simultaneous
cut per pair of current cells, producing open convex polygon cells whose
boundary lines form a product-of-lines curve of recorded degree.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np

from .cells import Cell, CellCover, HyperplaneParam
from .directions import DirectionSet
from .rational import as_fraction


def _scale_points(pts):
    denoms = [c.denominator for p in pts for c in p] or [1]
    L = lcm(*denoms)
    return [(int(p[0] * L), int(p[1] * L)) for p in pts], L


def side_counts(u: HyperplaneParam, pts) -> tuple[int, int, int]:
    """(negative, on-line, positive) strict side counts, exact."""
    neg = zero = pos = 0
    for p in pts:
        v = u.value(p)
        if v > 0:
            pos += 1
        elif v < 0:
            neg += 1
        else:
            zero += 1
    return neg, zero, pos


def balanced_for(u: HyperplaneParam, pts) -> bool:
    neg, _, pos = side_counts(u, pts)
    half = -(-len(pts) // 2)
    return neg <= half and pos <= half


def ham_sandwich_line(a_pts, b_pts) -> HyperplaneParam:
    """A line simultaneously bisecting two finite planar point sets."""
    a_pts = [tuple(as_fraction(c) for c in p) for p in a_pts]
    b_pts = [tuple(as_fraction(c) for c in p) for p in b_pts]
    allpts = a_pts + b_pts
    uniq = sorted(set(allpts))
    if not uniq:
        return HyperplaneParam((Fraction(1), Fraction(0), Fraction(0)))
    if len(uniq) == 1:
        (x, y) = uniq[0]
        return HyperplaneParam((Fraction(1), Fraction(0), -x))

    scaled, L = _scale_points(uniq)
    n_pts = len(scaled)
    cand = []
    for i in range(n_pts):
        px, py = scaled[i]
        for j in range(i + 1, n_pts):
            qx, qy = scaled[j]
            cand.append((py - qy, qx - px, px * qy - qx * py))
    cmat = np.array(cand, dtype=object)
    max_c = max(abs(int(x)) for row in cand for x in row)
    max_p = max(max(abs(x), abs(y)) for x, y in scaled)
    pmat = np.array([[x, y, 1] for x, y in scaled], dtype=object).T
    if max_c * max_p * 3 < 2**62:
        cmat = cmat.astype(np.int64)
        pmat = pmat.astype(np.int64)
    vals = cmat @ pmat  # (n_cand, n_pts)
    signs = np.sign(vals)

    idx_a = np.array([uniq.index(p) for p in a_pts], dtype=np.intp)
    idx_b = np.array([uniq.index(p) for p in b_pts], dtype=np.intp)
    half_a = -(-len(a_pts) // 2)
    half_b = -(-len(b_pts) // 2)

    sa = signs[:, idx_a] if len(idx_a) else signs[:, :0]
    sb = signs[:, idx_b] if len(idx_b) else signs[:, :0]
    ok = (
        ((sa > 0).sum(axis=1) <= half_a)
        & ((sa < 0).sum(axis=1) <= half_a)
        & ((sb > 0).sum(axis=1) <= half_b)
        & ((sb < 0).sum(axis=1) <= half_b)
    )
    hits = np.flatnonzero(ok)
    if not hits.size:
        raise AssertionError("no balanced pair line found; this cannot happen")
    a, b, c = (int(x) for x in cand[hits[0]])
    return HyperplaneParam((Fraction(a), Fraction(b), Fraction(c, L)))


# --------------------------------------------------------------- partitioner

def _clip_polygon(verts, u: HyperplaneParam, keep_positive: bool):
    sgn = 1 if keep_positive else -1
    vals = [sgn * u.value(p) for p in verts]
    out = []
    m = len(verts)
    for i in range(m):
        p, q = verts[i], verts[(i + 1) % m]
        vp, vq = vals[i], vals[(i + 1) % m]
        if vp >= 0:
            out.append(p)
        if (vp > 0 > vq) or (vp < 0 < vq):
            t = vp / (vp - vq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    dedup = []
    for p in out:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def _polygon_area2(verts) -> Fraction:
    acc = Fraction(0)
    for i in range(len(verts)):
        p, q = verts[i], verts[(i + 1) % len(verts)]
        acc += p[0] * q[1] - q[0] * p[1]
    return acc


def partition_points_2d(omega: DirectionSet, rounds: int) -> tuple[CellCover, int]:
    """Iterated simultaneous ham-sandwich cuts of a planar direction set.

    Returns an open convex-polygon cover together with the number of cut
    lines used; every cell holds at most ceil(N / 2^rounds) + rounds
    members (slack comes from points landing on cut lines).
    """
    if omega.dim != 2:
        raise ValueError("partitioner works on planar sets")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    pts = omega.points
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    span_x = (max(xs) - min(xs)) or Fraction(1)
    span_y = (max(ys) - min(ys)) or Fraction(1)
    lo_x, hi_x = min(xs) - span_x / 2, max(xs) + span_x / 2
    lo_y, hi_y = min(ys) - span_y / 2, max(ys) + span_y / 2
    bbox = [(lo_x, lo_y), (hi_x, lo_y), (hi_x, hi_y), (lo_x, hi_y)]

    cells = [{"poly": bbox, "members": list(range(len(pts)))}]
    degree = 0
    for r in range(rounds):
        nxt = []
        if r == 0:
            pairs = [(cells[0], None)]
        else:
            pairs = [(cells[i], cells[i + 1]) for i in range(0, len(cells) - 1, 2)]
            if len(cells) % 2 == 1:
                pairs.append((cells[-1], None))
        for left, right in pairs:
            group = [left] if right is None else [left, right]
            a_idx = left["members"]
            b_idx = right["members"] if right is not None else left["members"]
            line = ham_sandwich_line(
                [pts[i] for i in a_idx], [pts[i] for i in b_idx]
            )
            degree += 1
            for cell in group:
                nxt.extend(_split_cell(cell, line, pts))
        cells = nxt
    return _assemble_cover(omega, cells), degree


def _split_cell(cell, line: HyperplaneParam, pts):
    pos_poly = _clip_polygon(cell["poly"], line, True)
    neg_poly = _clip_polygon(cell["poly"], line, False)
    pos_ok = len(pos_poly) >= 3 and _polygon_area2(pos_poly) != 0
    neg_ok = len(neg_poly) >= 3 and _polygon_area2(neg_poly) != 0
    if not pos_ok and not neg_ok:
        return [cell]
    if not pos_ok or not neg_ok:
        # the cut missed this cell; keep it whole
        return [cell]
    pos_members, neg_members, on_line = [], [], []
    for i in cell["members"]:
        v = line.value(pts[i])
        (pos_members if v > 0 else neg_members if v < 0 else on_line).append(i)
    for i in on_line:
        # balance boundary points between the two children
        (pos_members if len(pos_members) <= len(neg_members) else neg_members).append(i)
    return [
        {"poly": pos_poly, "members": sorted(pos_members)},
        {"poly": neg_poly, "members": sorted(neg_members)},
    ]


def _assemble_cover(omega: DirectionSet, raw_cells) -> CellCover:
    cells = []
    reps = []
    for rc in raw_cells:
        if not rc["members"]:
            continue
        poly = rc["poly"]
        if _polygon_area2(poly) < 0:
            poly = list(reversed(poly))
        cell = Cell("convex-polygon", tuple(poly), tuple(rc["members"]), open=True)
        rep = rc["members"][0]
        for i in rc["members"]:
            if cell.contains(omega.points[i], closure=False):
                rep = i
                break
        cells.append(cell)
        reps.append(rep)
    return CellCover(omega, tuple(cells), tuple(reps))
