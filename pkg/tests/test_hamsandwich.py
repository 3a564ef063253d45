from fractions import Fraction as F

import numpy as np
import pytest

from mdht.directions import DirectionSet
from mdht.hamsandwich import (
    balanced_for,
    ham_sandwich_line,
    partition_points_2d,
)
from mdht.stabbing import stab_sup


def test_symmetric_example():
    a = [(F(0), F(0)), (F(1), F(0))]
    b = [(F(0), F(1)), (F(1), F(1))]
    line = ham_sandwich_line(a, b)
    assert balanced_for(line, a) and balanced_for(line, b)


def test_two_singletons():
    a, b = [(F(0), F(0))], [(F(1), F(2))]
    line = ham_sandwich_line(a, b)
    assert line.value(a[0]) == 0 and line.value(b[0]) == 0


def test_random_instances():
    rng = np.random.default_rng(123)
    for _ in range(60):
        na, nb = rng.integers(1, 30, size=2)
        a = list(dict.fromkeys(
            (F(int(x), 32), F(int(y), 32)) for x, y in rng.integers(-99, 99, (na, 2))
        ))
        b = list(dict.fromkeys(
            (F(int(x), 32), F(int(y), 32)) for x, y in rng.integers(-99, 99, (nb, 2))
        ))
        line = ham_sandwich_line(a, b)
        assert balanced_for(line, a)
        assert balanced_for(line, b)


def test_collinear_and_duplicated_sets():
    pts = [(F(i), F(i)) for i in range(9)]
    line = ham_sandwich_line(pts, pts)
    assert balanced_for(line, pts)
    line2 = ham_sandwich_line(pts, [(F(4), F(4))])
    assert balanced_for(line2, pts)


def random_omega(rng, n):
    pts = set()
    while len(pts) < n:
        x, y = rng.integers(-200, 200, size=2)
        pts.add((F(int(x), 64), F(int(y), 64)))
    return DirectionSet(2, tuple(sorted(pts)))


def test_partition_single_round():
    rng = np.random.default_rng(3)
    omega = random_omega(rng, 17)
    cover, degree = partition_points_2d(omega, 1)
    assert degree == 1
    assert len(cover.cells) == 2
    assert max(len(c.members) for c in cover.cells) <= -(-17 // 2) + 1


def test_partition_three_rounds():
    rng = np.random.default_rng(11)
    omega = random_omega(rng, 64)
    cover, degree = partition_points_2d(omega, 3)
    assert degree == 4  # 1 + 1 + 2 cut lines
    max_members = max(len(c.members) for c in cover.cells)
    assert max_members <= -(-64 // 8) + 3
    assert max_members <= 9
    res = stab_sup(cover)
    assert res.value <= degree + 1


def test_partition_cover_is_valid_and_exclusive():
    rng = np.random.default_rng(29)
    omega = random_omega(rng, 40)
    cover, _ = partition_points_2d(omega, 2)
    seen = []
    for c in cover.cells:
        seen.extend(c.members)
    assert sorted(seen) == list(range(40))  # partition, no double counting


def test_partition_arguments():
    rng = np.random.default_rng(5)
    omega = random_omega(rng, 8)
    with pytest.raises(ValueError):
        partition_points_2d(omega, 0)
    one_d = DirectionSet(1, ((F(1),), (F(2),)))
    with pytest.raises(ValueError):
        partition_points_2d(one_d, 1)
