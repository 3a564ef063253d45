from fractions import Fraction as F

import numpy as np
import pytest

from mdht.cells import (
    Cell,
    CellCover,
    HyperplaneParam,
    cell_hits_hyperplane,
    convex_hull,
    curve_cover,
    grid_cover_for_product,
    interval_cover_1d,
)
from mdht.directions import DirectionSet, boustrophedon_curve_samples, product, uniform
from mdht.stabbing import stab_count, stab_counts_float, stab_sup


def unit_grid_cover():
    cells, pts = [], []
    for x0, x1 in ((F(0), F(1, 2)), (F(1, 2), F(1))):
        for y0, y1 in ((F(0), F(1, 2)), (F(1, 2), F(1))):
            pts.append((x0 + F(1, 4), y0 + F(1, 4)))
            cells.append(Cell("box", ((x0, y0), (x1, y1)), (len(pts) - 1,)))
    return CellCover(DirectionSet(2, tuple(pts)), tuple(cells), tuple(range(4)))


def test_cell_hits_examples():
    pt = Cell("point", ((F(1), F(2)),), (0,))
    assert cell_hits_hyperplane(pt, HyperplaneParam((1, 1, -3)))
    assert not cell_hits_hyperplane(pt, HyperplaneParam((1, 1, 0)))
    box = Cell("box", ((F(2), F(2)), (F(3), F(3))), (0,))
    assert not cell_hits_hyperplane(box, HyperplaneParam((1, 0, 0)))  # x = 0 misses
    square = Cell("box", ((F(0), F(0)), (F(1), F(1))), (0,))
    # line y = x - 1/10 crosses the unit square
    assert cell_hits_hyperplane(square, HyperplaneParam((1, -1, F(-1, 10))))


def test_stab_count_examples():
    cover = unit_grid_cover()
    assert stab_count(cover, HyperplaneParam((1, -1, F(-1, 10)))) == 3
    # horizontal line through one row of open cells
    assert stab_count(cover, HyperplaneParam((0, 1, F(-1, 4)))) == 2


def test_disjoint_intervals_stab_at_most_one():
    omega = uniform(8)
    cover = interval_cover_1d(omega, 2)
    rng = np.random.default_rng(0)
    for _ in range(200):
        a = F(int(rng.integers(-8, 9)), int(rng.integers(1, 9)))
        b = F(int(rng.integers(-8, 9)), int(rng.integers(1, 9)))
        if a == 0 and b == 0:
            continue
        assert stab_count(cover, HyperplaneParam((a, b))) <= 1
    assert stab_sup(cover).value == 1


def test_stab_sup_single_cell():
    cell = Cell("convex-polygon", ((F(0), F(0)), (F(1), F(0)), (F(0), F(1))), (0,),
                open=False)
    cover = CellCover(DirectionSet(2, ((F(1, 4), F(1, 4)),)), (cell,), (0,))
    res = stab_sup(cover)
    assert res.value == 1
    assert stab_count(cover, res.witness) == 1


@pytest.mark.parametrize("n1", [4, 8])
def test_grid_lemma_exact(n1):
    omega = product([uniform(n1), uniform(n1)])
    cover = grid_cover_for_product(omega, (2, 2))
    assert len(cover.cells) == (n1 // 2) ** 2
    assert all(len(c.members) == 4 for c in cover.cells)
    res = stab_sup(cover)
    assert res.value <= n1 - 1
    assert stab_count(cover, res.witness) == res.value


def test_grid_cover_structure():
    omega = product([uniform(4), uniform(4)])
    cover = grid_cover_for_product(omega, (1, 1))
    assert len(cover.cells) == 16 and all(len(c.members) == 1 for c in cover.cells)
    omega3 = product([uniform(6), uniform(4), uniform(2)])
    cover3 = grid_cover_for_product(omega3, (3, 2, 1))
    q = 3 * 2 * 1
    for c in cover3.cells:
        assert q <= len(c.members) <= (3 + 1) * (2 + 1) * (1 + 1)
    with pytest.raises(ValueError):
        grid_cover_for_product(DirectionSet(2, ((F(0), F(0)), (F(1), F(2)),
                                                (F(2), F(1)))), (1, 1))


def test_curve_cover():
    bous, d = boustrophedon_curve_samples(4)
    whole = curve_cover(bous, len(bous))
    assert len(whole.cells) == 1 and whole.cells[0].kind == "curve-arc"
    pairs = curve_cover(bous, 2)
    assert len(pairs.cells) == 8
    assert all(len(c.members) == 2 for c in pairs.cells)
    res = stab_sup(pairs)
    assert res.value <= d  # curve crossing bound survives the cover
    eight = curve_cover(DirectionSet(1, tuple((F(i, 8),) for i in range(1, 9))), 2)
    assert len(eight.cells) == 4


def test_cover_validation():
    cell = Cell("box", ((F(0), F(0)), (F(1), F(1))), (0,))
    omega = DirectionSet(2, ((F(2), F(2)),))
    with pytest.raises(ValueError, match="outside cell closure"):
        CellCover(omega, (cell,), (0,))
    omega2 = DirectionSet(2, ((F(1, 2), F(1, 2)), (F(1, 4), F(1, 4))))
    with pytest.raises(ValueError, match="cover every point"):
        CellCover(omega2, (Cell("box", ((F(0), F(0)), (F(1), F(1))), (0,)),), (0,))


def test_exact_vs_sampled_random_covers():
    rng = np.random.default_rng(77)
    for _ in range(20):
        cells, pts = [], []
        for _ in range(int(rng.integers(2, 8))):
            cx, cy = rng.uniform(-5, 5, size=2)
            raw = [
                (F(round((cx + np.cos(t)) * 32), 32),
                 F(round((cy + np.sin(t)) * 32), 32))
                for t in np.sort(rng.uniform(0, 2 * np.pi, size=6))
            ]
            verts = convex_hull(raw)
            if len(verts) < 3:
                continue
            rep = (sum(v[0] for v in verts) / len(verts),
                   sum(v[1] for v in verts) / len(verts))
            if rep in pts:
                continue
            pts.append(rep)
            cells.append(Cell("convex-polygon", tuple(verts), (len(pts) - 1,),
                              open=bool(rng.integers(0, 2))))
        cover = CellCover(DirectionSet(2, tuple(pts)), tuple(cells),
                          tuple(range(len(cells))))
        exact = stab_sup(cover)
        sampled = int(stab_counts_float(cover, rng.standard_normal((20000, 3))).max())
        assert exact.value >= sampled
        assert stab_count(cover, exact.witness) == exact.value


def test_cover_json_roundtrip(tmp_path):
    omega = product([uniform(4), uniform(4)])
    cover = grid_cover_for_product(omega, (2, 2))
    path = tmp_path / "cover.json"
    cover.save(path)
    back = CellCover.load(path)
    assert len(back.cells) == len(cover.cells)
    assert stab_sup(back).value == stab_sup(cover).value


def test_exact_mode_rejects_3d():
    omega = product([uniform(2), uniform(2), uniform(2)])
    cover = grid_cover_for_product(omega, (1, 1, 1))
    with pytest.raises(ValueError):
        stab_sup(cover, exact=True)
    res = stab_sup(cover, exact=False, samples=2000)
    assert res.mode == "sampled-lower-estimate"
    assert res.value >= 1
