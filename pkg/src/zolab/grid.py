"""Torus geometry of the pixel lattice.

Pixels live on an n x n grid with periodic boundary (coordinates mod n) and
8-connectivity, so the graph distance equals the toroidal Chebyshev distance
and the radius-r ball around any pixel is a (2r+1) x (2r+1) square.

Coordinates are 0-based ``(row, col)`` pairs internally; classical image
notation indexes the same lattice from 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import BallTooLarge


class Pixel(NamedTuple):
    row: int
    col: int


@dataclass(frozen=True)
class TorusGeometry:
    """Geometry of the n x n pixel torus."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"side length must be >= 1, got {self.n}")

    def wrap_add(self, x: Pixel, offset: tuple[int, int]) -> Pixel:
        """Componentwise addition modulo n."""
        return Pixel((x[0] + offset[0]) % self.n, (x[1] + offset[1]) % self.n)

    def distance(self, x: Pixel, y: Pixel) -> int:
        """Graph distance under 8-connectivity: toroidal Chebyshev distance.

        Equals max over coordinates of the circular distance
        min(|delta|, n - |delta|).
        """
        n = self.n
        dr = abs(x[0] - y[0]) % n
        dc = abs(x[1] - y[1]) % n
        return max(min(dr, n - dr), min(dc, n - dc))

    def ball(self, x: Pixel, r: int) -> list[Pixel]:
        """All pixels at distance <= r from x, in row-major offset order.

        The order is fixed to offsets (-r..r) x (-r..r) so that ball
        templates index deterministically. Raises BallTooLarge when the
        ball diameter exceeds the grid side (it would wrap onto itself).
        """
        if r < 0:
            raise ValueError(f"radius must be >= 0, got {r}")
        if 2 * r + 1 > self.n:
            raise BallTooLarge(f"ball diameter {2 * r + 1} exceeds side {self.n}")
        return [self.wrap_add(x, (dr, dc)) for dr in range(-r, r + 1) for dc in range(-r, r + 1)]

    def tiling(self, r: int) -> list[Pixel]:
        """Centers of a maximal set of pairwise disjoint radius-r balls.

        Returns {(r + a*(2r+1), r + b*(2r+1)) : a, b = 0..floor(n/(2r+1))-1};
        distinct centers are at distance > 2r, so their balls are disjoint
        and the pixel colorings inside them are independent. Empty when
        n < 2r+1.
        """
        if r < 0:
            raise ValueError(f"radius must be >= 0, got {r}")
        side = 2 * r + 1
        reps = self.n // side
        return [Pixel(r + a * side, r + b * side) for a in range(reps) for b in range(reps)]

    def tiling_size(self, r: int) -> int:
        """Cardinality floor(n/(2r+1))^2 of the disjoint-ball tiling."""
        return (self.n // (2 * r + 1)) ** 2


def ball_offsets(r: int) -> list[tuple[int, int]]:
    """Row-major offsets (-r..r) x (-r..r); index i is template cell i."""
    return [(dr, dc) for dr in range(-r, r + 1) for dc in range(-r, r + 1)]
