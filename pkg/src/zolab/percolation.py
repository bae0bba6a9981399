"""6-connected crossing events and their exact duality.

A 6-connected path steps by +-(1,0), +-(0,1), or +-(1,1) (never the other
diagonal) and does not wrap around the borders: crossings intentionally use
planar semantics, unlike the torus arithmetic everywhere else. BLR is a
black path joining the first and last column; WTB a white path joining the
first and last row. On every image exactly one of the two holds.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import kernels
from .errors import TooLargeToEnumerate
from .image import Image

DEFAULT_MAX_ENUM_N = 4


class PathColor(Enum):
    BLACK = 1
    WHITE = 0


class Direction(Enum):
    LEFT_RIGHT = "left-right"  # first column to last column
    TOP_BOTTOM = "top-bottom"  # first row to last row


@dataclass(frozen=True)
class CrossingSpec:
    color: PathColor
    direction: Direction


BLR = CrossingSpec(PathColor.BLACK, Direction.LEFT_RIGHT)
WTB = CrossingSpec(PathColor.WHITE, Direction.TOP_BOTTOM)


def crosses(img: Image, spec: CrossingSpec) -> bool:
    """Is there a 6-connected monochromatic path joining the two borders?"""
    axis = 0 if spec.direction is Direction.TOP_BOTTOM else 1
    return bool(kernels.crosses(img.pixels, spec.color.value, axis))


@dataclass(frozen=True)
class DualityReport:
    total: int
    violations: int
    blr_count: int


def duality_check(n: int, max_enum_n: int = DEFAULT_MAX_ENUM_N) -> DualityReport:
    """Enumerate all images of side n and count BLR/WTB coincidences.

    A violation is an image where BLR and WTB agree (both true or both
    false); the duality claim is that none exist. Also reports how many
    images satisfy BLR, which by black/white symmetry must be exactly half
    of them.
    """
    if n > max_enum_n:
        raise TooLargeToEnumerate(f"2**{n * n} images; enumeration capped at side {max_enum_n}")
    total = 1 << (n * n)
    violations = 0
    blr_count = 0
    for code in range(total):
        img = Image.from_int(n, code)
        blr = crosses(img, BLR)
        wtb = crosses(img, WTB)
        if blr == wtb:
            violations += 1
        if blr:
            blr_count += 1
    return DualityReport(total=total, violations=violations, blr_count=blr_count)
