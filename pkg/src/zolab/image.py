"""Binary images and the product-Bernoulli random image model.

An image is an n x n grid of pixels, each black (1) or white (0). The random
model draws every pixel independently black with probability p. Sampling is
a pure function of (n, p, seed); replicate streams are derived from a master
seed with a splittable counter scheme so parallel and serial runs see the
same images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MalformedPBM, NonSquare

# Below this pixel probability the sampler draws a binomial black count and
# places that many distinct pixels instead of testing every cell.
SPARSE_P_LIMIT = 0.05


class Image:
    """Immutable n x n binary image; pixel value 1 is black, 0 is white."""

    __slots__ = ("_pixels",)

    def __init__(self, pixels: np.ndarray):
        a = np.asarray(pixels)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square 2-d array, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("side length must be >= 1")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("pixel values must be 0 or 1")
        a = a.astype(np.uint8, copy=True)
        a.flags.writeable = False
        self._pixels = a

    @classmethod
    def _from_trusted(cls, pixels: np.ndarray) -> "Image":
        # Sampler fast path: pixels known to be a fresh square uint8 0/1 array.
        self = object.__new__(cls)
        pixels.flags.writeable = False
        self._pixels = pixels
        return self

    @property
    def n(self) -> int:
        return self._pixels.shape[0]

    @property
    def pixels(self) -> np.ndarray:
        """Read-only (n, n) uint8 array, row-major."""
        return self._pixels

    @classmethod
    def solid(cls, n: int, value: int) -> "Image":
        return cls(np.full((n, n), value, dtype=np.uint8))

    @classmethod
    def from_int(cls, n: int, code: int) -> "Image":
        """Image whose row-major pixel i is bit i of ``code``.

        Inverse of :meth:`to_int`; the enumeration oracle iterates all
        2**(n*n) images through these codes.
        """
        if not 0 <= code < 1 << (n * n):
            raise ValueError(f"code out of range for n={n}")
        bits = (code >> np.arange(n * n, dtype=np.uint64)) & 1
        return cls(bits.reshape(n, n))

    def to_int(self) -> int:
        bits = self._pixels.reshape(-1)
        return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")

    def black_count(self) -> int:
        return int(self._pixels.sum())

    def complement(self) -> "Image":
        return Image(1 - self._pixels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._pixels, other._pixels))

    def __hash__(self) -> int:
        return hash((self.n, self._pixels.tobytes()))

    def __repr__(self) -> str:
        return f"Image(n={self.n}, black={self.black_count()})"


@dataclass(frozen=True)
class SampleSpec:
    """Parameters of one random image draw."""

    n: int
    p: float
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"side length must be >= 1, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"probability must be in [0, 1], got {self.p}")
        if not 0 <= int(self.seed) < 1 << 64:
            raise ValueError("seed must be a 64-bit nonnegative integer")


def rng_for(seed: int, replicate: int | None = None) -> np.random.Generator:
    """Counter-based generator for a master seed, or for one replicate of it.

    Replicate streams use the seed sequence spawn key, so stream i is the
    same whether replicates run serially or are partitioned across workers.
    """
    if replicate is None:
        ss = np.random.SeedSequence(seed)
    else:
        ss = np.random.SeedSequence(seed, spawn_key=(replicate,))
    return np.random.Generator(np.random.Philox(ss))


def sample(spec: SampleSpec) -> Image:
    """Draw one image: each pixel independently black with probability p."""
    return sample_with_rng(spec.n, spec.p, rng_for(spec.seed))


def sample_replicate(n: int, p: float, seed: int, replicate: int) -> Image:
    """Draw replicate ``replicate`` of a Monte Carlo run with master ``seed``."""
    return sample_with_rng(n, p, rng_for(seed, replicate))


def sample_with_rng(n: int, p: float, rng: np.random.Generator) -> Image:
    # Path choice depends only on (n, p), keeping sample() a pure function
    # of the spec.
    if p <= SPARSE_P_LIMIT:
        return _sample_sparse(n, p, rng)
    return _sample_dense(n, p, rng)


def _sample_dense(n: int, p: float, rng: np.random.Generator) -> Image:
    return Image._from_trusted((rng.random((n, n)) < p).astype(np.uint8))


def _sample_sparse(n: int, p: float, rng: np.random.Generator) -> Image:
    """Binomial count + uniform distinct placement; same distribution as dense."""
    cells = n * n
    k = int(rng.binomial(cells, p))
    pixels = np.zeros(cells, dtype=np.uint8)
    if k:
        pixels[_floyd_sample(cells, k, rng)] = 1
    return Image._from_trusted(pixels.reshape(n, n))


def _floyd_sample(cells: int, k: int, rng: np.random.Generator) -> list[int]:
    """Uniform k-subset of range(cells) in O(k) draws (Floyd's algorithm)."""
    bounds = np.arange(cells - k + 1, cells + 1, dtype=np.int64)
    draws = rng.integers(0, bounds)
    chosen: set[int] = set()
    for j, t in zip(range(cells - k, cells), draws.tolist()):
        chosen.add(j if t in chosen else t)
    return sorted(chosen)


def complement(img: Image) -> Image:
    """Flip every pixel; an involution."""
    return img.complement()


def black_count(img: Image) -> int:
    return img.black_count()


def parity_probability(n: int, p: float) -> float:
    """Exact probability that the number of black pixels is even.

    Closed form (1 + (1-2p)**(n*n)) / 2; equal to 1/2 whenever p = 1/2.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    return 0.5 * (1.0 + (1.0 - 2.0 * p) ** (n * n))


def write_pbm(img: Image) -> bytes:
    """Canonical plain PBM (P1): one image row per line, 1 = black."""
    lines = [b"P1", f"{img.n} {img.n}".encode()]
    for row in img.pixels:
        lines.append(" ".join(str(int(v)) for v in row).encode())
    return b"\n".join(lines) + b"\n"


def read_pbm(data: bytes | str) -> Image:
    """Whitespace-tolerant plain PBM (P1) reader; requires width == height.

    Accepts ``#`` comments anywhere and raster digits with or without
    separating whitespace, per the PBM convention.
    """
    if isinstance(data, str):
        data = data.encode()
    text = re_strip_comments(data)
    tokens = text.split()
    if not tokens or tokens[0] != b"P1":
        raise MalformedPBM("missing P1 magic")
    if len(tokens) < 3:
        raise MalformedPBM("truncated header")
    try:
        width, height = int(tokens[1]), int(tokens[2])
    except ValueError as exc:
        raise MalformedPBM(f"bad dimensions: {exc}") from exc
    if width < 1 or height < 1:
        raise MalformedPBM("dimensions must be positive")
    if width != height:
        raise NonSquare(f"expected a square image, got {width} x {height}")
    raster = b"".join(tokens[3:])
    if len(raster) != width * height:
        raise MalformedPBM(f"expected {width * height} raster digits, got {len(raster)}")
    if raster.translate(None, b"01"):
        raise MalformedPBM("raster contains characters other than 0/1")
    bits = np.frombuffer(raster, dtype=np.uint8) - ord("0")
    return Image(bits.reshape(height, width))


def re_strip_comments(data: bytes) -> bytes:
    """Drop ``#`` comments (to end of line), preserving line structure."""
    out = []
    for line in data.split(b"\n"):
        hash_at = line.find(b"#")
        out.append(line if hash_at < 0 else line[:hash_at])
    return b"\n".join(out)
