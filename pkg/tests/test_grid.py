"""Torus geometry: wrap arithmetic, distance vs BFS oracle, balls, tiling."""

from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zolab.errors import BallTooLarge
from zolab.grid import Pixel, TorusGeometry, ball_offsets


def bfs_distances(n: int, src: Pixel) -> dict:
    """Independent oracle: BFS over the explicit 8-connectivity torus graph."""
    dist = {src: 0}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == dc == 0:
                    continue
                y = Pixel((x[0] + dr) % n, (x[1] + dc) % n)
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
    return dist


def test_wrap_add_examples():
    assert TorusGeometry(5).wrap_add(Pixel(4, 4), (1, 1)) == Pixel(0, 0)
    assert TorusGeometry(5).wrap_add(Pixel(2, 2), (0, 0)) == Pixel(2, 2)
    assert TorusGeometry(2).wrap_add(Pixel(1, 0), (1, 0)) == Pixel(0, 0)
    assert TorusGeometry(5).wrap_add(Pixel(0, 0), (-1, -2)) == Pixel(4, 3)


def test_distance_examples():
    assert TorusGeometry(5).distance(Pixel(0, 0), Pixel(4, 4)) == 1
    assert TorusGeometry(5).distance(Pixel(0, 0), Pixel(2, 1)) == 2
    assert TorusGeometry(7).distance(Pixel(3, 6), Pixel(3, 6)) == 0


def test_distance_derived_example_against_bfs():
    # n=6: BFS oracle fixes the expected value
    oracle = bfs_distances(6, Pixel(0, 0))[Pixel(3, 1)]
    assert oracle == 3
    assert TorusGeometry(6).distance(Pixel(0, 0), Pixel(3, 1)) == oracle


@pytest.mark.parametrize("n", range(1, 9))
def test_distance_equals_bfs_all_pairs(n):
    geom = TorusGeometry(n)
    for sr in range(n):
        for sc in range(n):
            oracle = bfs_distances(n, Pixel(sr, sc))
            for y, d in oracle.items():
                assert geom.distance(Pixel(sr, sc), y) == d


@given(st.integers(1, 30), st.tuples(st.integers(0, 29), st.integers(0, 29)),
       st.tuples(st.integers(0, 29), st.integers(0, 29)))
def test_distance_symmetry(n, a, b):
    geom = TorusGeometry(n)
    x = Pixel(a[0] % n, a[1] % n)
    y = Pixel(b[0] % n, b[1] % n)
    assert geom.distance(x, y) == geom.distance(y, x)
    assert (geom.distance(x, y) == 0) == (x == y)


def test_ball_is_square_around_center():
    ball = TorusGeometry(5).ball(Pixel(2, 2), 1)
    assert len(ball) == 9
    assert ball == [Pixel(r, c) for r in (1, 2, 3) for c in (1, 2, 3)]


def test_ball_radius_zero_and_wrap():
    assert TorusGeometry(7).ball(Pixel(3, 4), 0) == [Pixel(3, 4)]
    ball = TorusGeometry(4).ball(Pixel(0, 0), 1)
    assert len(ball) == 9
    for p in (Pixel(3, 3), Pixel(3, 0), Pixel(0, 3)):
        assert p in ball


def test_ball_order_matches_offsets():
    geom = TorusGeometry(6)
    x = Pixel(1, 5)
    assert geom.ball(x, 2) == [geom.wrap_add(x, off) for off in ball_offsets(2)]


def test_ball_too_large():
    with pytest.raises(BallTooLarge):
        TorusGeometry(2).ball(Pixel(0, 0), 1)
    with pytest.raises(BallTooLarge):
        TorusGeometry(4).ball(Pixel(0, 0), 2)


def test_ball_contains_exactly_the_close_pixels():
    geom = TorusGeometry(7)
    x = Pixel(2, 3)
    ball = set(geom.ball(x, 2))
    for r in range(7):
        for c in range(7):
            assert (Pixel(r, c) in ball) == (geom.distance(x, Pixel(r, c)) <= 2)


def test_tiling_examples():
    centers = TorusGeometry(10).tiling(1)
    assert len(centers) == 9
    assert centers == [Pixel(r, c) for r in (1, 4, 7) for c in (1, 4, 7)]
    assert TorusGeometry(3).tiling(1) == [Pixel(1, 1)]
    assert TorusGeometry(2).tiling(1) == []


@given(st.integers(1, 20), st.integers(0, 3))
@settings(max_examples=60)
def test_tiling_properties(n, r):
    geom = TorusGeometry(n)
    centers = geom.tiling(r)
    assert len(centers) == geom.tiling_size(r) == (n // (2 * r + 1)) ** 2
    if 2 * r + 1 > n:
        assert centers == []
        return
    balls = [set(geom.ball(x, r)) for x in centers]
    for i, x in enumerate(centers):
        assert len(balls[i]) == (2 * r + 1) ** 2
        for j in range(i):
            assert geom.distance(x, centers[j]) > 2 * r
            assert not (balls[i] & balls[j])
