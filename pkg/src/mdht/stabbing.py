"""Exact and sampled computation of the stabbing statistic E(u).

E(u) counts the cells of a cover met by the hyperplane {y : u . <y,1> = 0}.
Its supremum over u enters operator-norm certificates under a square root,
so the planar computation here is exact: the count is piecewise constant
on the dual arrangement of the cell vertices, and its maximum is attained
either on a line through two vertices or on a face adjacent to one.  The
candidate set is therefore every vertex-pair line plus the axis-parallel
lines through each vertex, each examined unperturbed and under the four
symbolic perturbations (normal shifts and rotations about the pair
midpoint), with the perturbation sign resolved lexicographically.  A
maximizing witness is realized with an explicit rational epsilon small
enough to reproduce the symbolic sign pattern, then re-verified.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .cells import CellCover, HyperplaneParam, cell_hits_hyperplane


def stab_count(cover: CellCover, u: HyperplaneParam) -> int:
    """Number of cells met by Z(P_u), by exact per-cell sign tests."""
    return sum(1 for c in cover.cells if cell_hits_hyperplane(c, u))


@dataclass
class StabResult:
    value: int
    witness: HyperplaneParam
    mode: str  # "exact" or "sampled-lower-estimate"


# ----------------------------------------------------------------- 1-d case

def _stab_sup_1d(cover: CellCover) -> StabResult:
    endpoints = sorted({v[0] for c in cover.cells for v in c.vertices()})
    candidates = []
    for t in endpoints:
        candidates.append(t)
    for a, b in zip(endpoints, endpoints[1:]):
        candidates.append((a + b) / 2)
    candidates.append(endpoints[0] - 1)
    candidates.append(endpoints[-1] + 1)
    best, best_t = -1, None
    for t in candidates:
        u = HyperplaneParam((Fraction(1), -t))
        n = stab_count(cover, u)
        if n > best:
            best, best_t = n, t
    return StabResult(best, HyperplaneParam((Fraction(1), -best_t)), "exact")


# ----------------------------------------------------------------- 2-d case

def _scaled_vertex_data(cover: CellCover):
    """Integer-scaled vertices per cell, and the positive scale factor."""
    per_cell = [c.vertices() for c in cover.cells]
    denoms = [x.denominator for vs in per_cell for v in vs for x in v] or [1]
    L = lcm(*denoms)
    scaled_cells = [
        [(int(v[0] * L), int(v[1] * L)) for v in vs] for vs in per_cell
    ]
    return scaled_cells, L


def _candidate_lines(verts):
    """Deduped (line, rotation-correction) integer coefficient pairs.

    line = (a, b, c) with P(x) = a x + b y + c; correction = coefficients
    of the linear form that breaks ties when P(x) = 0 under rotation about
    the pair midpoint (or about the vertex for axis lines).
    """
    cands = {}

    def norm_key(a, b, c):
        g = gcd(gcd(abs(a), abs(b)), abs(c)) or 1
        a, b, c = a // g, b // g, c // g
        lead = next(x for x in (a, b, c) if x != 0)
        if lead < 0:
            a, b, c = -a, -b, -c
        return (a, b, c)

    uniq = sorted(set(verts))
    for i in range(len(uniq)):
        px, py = uniq[i]
        # axis-parallel lines through the vertex; rotation about the vertex
        cands[(norm_key(1, 0, -px), (0, 1, -py))] = ((1, 0, -px), (0, 1, -py))
        cands[(norm_key(0, 1, -py), (1, 0, -px))] = ((0, 1, -py), (1, 0, -px))
        for j in range(i + 1, len(uniq)):
            qx, qy = uniq[j]
            dx, dy = qx - px, qy - py
            a, b = -dy, dx
            c = -(a * px + b * py)
            corr = (2 * dx, 2 * dy, -(dx * (px + qx) + dy * (py + qy)))
            cands[(norm_key(a, b, c), corr)] = ((a, b, c), corr)
    lines = [v[0] for v in cands.values()]
    corrs = [v[1] for v in cands.values()]
    return lines, corrs


def _hit_matrix(cover: CellCover, signs, cell_layout):
    """Per-candidate hit booleans for every cell, from a sign matrix.

    signs has one column per concatenated cell vertex, cells in order.
    """
    n_cand = signs.shape[0]
    starts, conv_cols, conv_open, point_cols = cell_layout["convex"]
    arc_left, arc_right, arc_starts = cell_layout["arcs"]
    hits = np.zeros((n_cand, len(cover.cells)), dtype=bool)

    if conv_cols.size:
        sub = signs[:, conv_cols]
        mins = np.minimum.reduceat(sub, starts, axis=1)
        maxs = np.maximum.reduceat(sub, starts, axis=1)
        open_mask = conv_open
        h = np.where(open_mask, (mins < 0) & (maxs > 0), (mins <= 0) & (maxs >= 0))
        hits[:, cell_layout["convex_ids"]] = h
    if arc_left.size:
        prod = signs[:, arc_left].astype(np.int16) * signs[:, arc_right].astype(np.int16)
        mins = np.minimum.reduceat(prod, arc_starts, axis=1)
        hits[:, cell_layout["arc_ids"]] = mins <= 0
    return hits


def _build_layout(cover: CellCover, scaled_cells):
    """Column layout of concatenated cell vertices for batched reduction."""
    cols = []
    convex_ids, conv_starts, conv_open = [], [], []
    arc_ids, arc_left, arc_right, arc_starts = [], [], [], []
    pos = 0
    conv_cols = []
    for idx, (cell, verts) in enumerate(zip(cover.cells, scaled_cells)):
        base = len(cols)
        cols.extend(verts)
        if cell.kind == "curve-arc" and len(verts) > 1:
            arc_ids.append(idx)
            arc_starts.append(len(arc_left))
            for k in range(len(verts) - 1):
                arc_left.append(base + k)
                arc_right.append(base + k + 1)
        else:
            convex_ids.append(idx)
            conv_starts.append(len(conv_cols))
            conv_cols.extend(range(base, base + len(verts)))
            conv_open.append(cell.open and cell.kind not in ("point", "curve-arc"))
    return {
        "columns": cols,
        "convex": (
            np.array(conv_starts, dtype=np.intp),
            np.array(conv_cols, dtype=np.intp),
            np.array(conv_open, dtype=bool),
            None,
        ),
        "convex_ids": np.array(convex_ids, dtype=np.intp),
        "arcs": (
            np.array(arc_left, dtype=np.intp),
            np.array(arc_right, dtype=np.intp),
            np.array(arc_starts, dtype=np.intp),
        ),
        "arc_ids": np.array(arc_ids, dtype=np.intp),
    }


_VARIANTS = ("base", "shift+", "shift-", "rot+", "rot-")


def _stab_sup_2d_exact(cover: CellCover) -> StabResult:
    scaled_cells, L = _scaled_vertex_data(cover)
    layout = _build_layout(cover, scaled_cells)
    cols = layout["columns"]
    verts = sorted({v for vs in scaled_cells for v in vs})
    lines, corrs = _candidate_lines(verts)

    vmat = np.array([[x, y, 1] for (x, y) in cols], dtype=object).T
    lmat = np.array(lines, dtype=object)
    cmat = np.array(corrs, dtype=object)
    # object matmul keeps exact Python ints; switch to int64 when safe
    max_coord = max((max(abs(x), abs(y)) for x, y in verts), default=1)
    max_line = max((max(abs(a), abs(b), abs(c)) for a, b, c in lines), default=1)
    if max_line * max_coord * 3 < 2**62:
        vmat = vmat.astype(np.int64)
        lmat = lmat.astype(np.int64)
        cmat = cmat.astype(np.int64)
    P = lmat @ vmat
    CR = cmat @ vmat
    S = np.sign(P).astype(np.int8)
    SC = np.sign(CR).astype(np.int8)

    best = (-1, 0, "base")
    for name in _VARIANTS:
        if name == "base":
            var = S
        elif name == "shift+":
            var = np.where(S == 0, np.int8(1), S)
        elif name == "shift-":
            var = np.where(S == 0, np.int8(-1), S)
        elif name == "rot+":
            var = np.where(S == 0, SC, S)
        else:
            var = np.where(S == 0, -SC, S)
        counts = _hit_matrix(cover, var, layout).sum(axis=1)
        k = int(np.argmax(counts))
        if counts[k] > best[0]:
            best = (int(counts[k]), k, name)

    value, k, name = best
    witness = _realize_witness(lines[k], corrs[k], name, P[k], CR[k], L)
    check = stab_count(cover, witness)
    if check != value:
        raise AssertionError(
            f"witness re-verification failed: {check} != {value} ({name})"
        )
    return StabResult(value, witness, "exact")


def _realize_witness(line, corr, variant, p_row, cr_row, L) -> HyperplaneParam:
    """Turn a (line, symbolic-perturbation) pair into a concrete rational
    line achieving the same sign pattern on every vertex."""
    a, b, c = (int(x) for x in line)
    base = (Fraction(a), Fraction(b), Fraction(c, L))
    if variant == "base":
        return HyperplaneParam(base)
    p_abs = [abs(int(x)) for x in p_row]
    if variant in ("shift+", "shift-"):
        nz = [x for x in p_abs if x != 0]
        eps = Fraction(min(nz), 2) if nz else Fraction(1)
        sgn = 1 if variant == "shift+" else -1
        return HyperplaneParam((base[0], base[1], base[2] + sgn * Fraction(eps, L)))
    cr_abs = [abs(int(x)) for x in cr_row]
    nz = [
        Fraction(p, cr + 1)
        for p, cr in zip(p_abs, cr_abs)
        if p != 0
    ]
    eps = min(nz) / 2 if nz else Fraction(1)
    sgn = 1 if variant == "rot+" else -1
    ca, cb, cc = (int(x) for x in corr)
    return HyperplaneParam(
        (
            base[0] + sgn * eps * ca,
            base[1] + sgn * eps * cb,
            base[2] + sgn * eps * Fraction(cc, L),
        )
    )


def stab_counts_float(cover: CellCover, us: np.ndarray) -> np.ndarray:
    """Float sampling oracle: stab counts for a (K, dim+1) matrix of u rows.

    Ties at exact zero are numerically improbable for random u; results
    are lower evidence, never certified values.
    """
    per_cell = [c.vertices() for c in cover.cells]
    scaled_cells = [[tuple(float(x) for x in v) for v in vs] for vs in per_cell]
    layout = _build_layout(cover, scaled_cells)
    cols = np.array([list(v) + [1.0] for v in layout["columns"]], dtype=float).T
    vals = np.asarray(us, dtype=float) @ cols
    signs = np.sign(vals).astype(np.int8)
    hits = _hit_matrix(cover, signs, layout)
    return hits.sum(axis=1)


def stab_sup(cover: CellCover, exact: bool | None = None, samples: int = 20000,
             seed: int = 0) -> StabResult:
    """Supremum of the stabbing count.

    Exact mode (default for dims 1 and 2) enumerates candidate lines as
    described in the module docstring.  Sampled mode draws random
    hyperplanes plus axis-parallel structured candidates and is flagged a
    lower estimate; dimensions above 2 only support sampled mode.
    """
    dim = cover.dim
    if exact is None:
        exact = dim <= 2
    if exact:
        if dim == 1:
            return _stab_sup_1d(cover)
        if dim == 2:
            return _stab_sup_2d_exact(cover)
        raise ValueError("exact stabbing supremum is only available for dim <= 2")

    rng = np.random.default_rng(seed)
    us = rng.standard_normal((samples, dim + 1))
    counts = stab_counts_float(cover, us)
    k = int(np.argmax(counts))
    best, best_u = int(counts[k]), HyperplaneParam(tuple(us[k]))
    for c in cover.cells:
        for v in c.vertices():
            for axis in range(dim):
                coeff = [Fraction(0)] * (dim + 1)
                coeff[axis] = Fraction(1)
                coeff[-1] = -v[axis]
                u = HyperplaneParam(tuple(coeff))
                n = stab_count(cover, u)
                if n > best:
                    best, best_u = n, u
    return StabResult(best, best_u, "sampled-lower-estimate")
