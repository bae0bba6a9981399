"""Ball descriptions, pattern sentences, and basic local sentences.

A complete description of a radius-r ball fixes the color of all
``(2r+1)**2`` cells; it is stored as an integer code (bit i = color of
row-major ball cell i). A basic local sentence asserts the existence of m
centers at pairwise torus distance > 2r whose balls each satisfy a local
one-free-variable formula; factoring replaces each formula by the set of
ball descriptions that realize it. Description sets are kept packed (see
``_bitsets``); at radius 2 a single set can hold millions of members, so
they are never expanded into explicit disjunctions.

Ball-local formulas are evaluated on the ball as a plain subgrid, without
wraparound; matching a description against an image uses torus arithmetic
and therefore requires ``n >= 2r+2``, which keeps the two readings
consistent (at ``n = 2r+1`` wrap would make opposite ball edges adjacent).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Optional, Sequence

import numpy as np

from . import _bitsets as bs
from . import kernels
from .errors import ImageTooSmall, InputError, MalformedPBM, RadiusTooLarge, ResourceError
from .folang import (
    And,
    Color,
    DistGt,
    Eq,
    Forall,
    Exists,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Rel,
    REL_OFFSETS,
    free_variables,
    parse,
    to_text,
)
from .grid import Pixel, TorusGeometry, ball_offsets
from .image import Image

DEFAULT_MAX_BALL_CELLS = 25  # r <= 2
_HARD_CELL_CAP = 30  # memory guard: a packed table already costs 2**cells bits

MAX_JSON_DESCRIPTIONS = 4096


def _cells(r: int) -> int:
    return (2 * r + 1) ** 2


def _require_matchable(n: int, r: int) -> None:
    if n < 2 * r + 2:
        raise ImageTooSmall(f"torus side {n} < 2r+2 = {2 * r + 2}; ball matching needs wrap-free balls")


@dataclass(frozen=True)
class Description:
    """Complete coloring of a radius-r ball."""

    r: int
    code: int

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("radius must be >= 0")
        if not 0 <= self.code < 1 << _cells(self.r):
            raise ValueError(f"code out of range for radius {self.r}")

    @property
    def cells(self) -> int:
        return _cells(self.r)

    @property
    def k(self) -> int:
        """Number of black cells."""
        return self.code.bit_count()

    @property
    def h(self) -> int:
        """Number of white cells."""
        return self.cells - self.k

    @property
    def template(self) -> np.ndarray:
        """(2r+1, 2r+1) uint8 array in row-major offset order."""
        side = 2 * self.r + 1
        bits = (self.code >> np.arange(self.cells, dtype=np.uint64)) & 1
        return bits.reshape(side, side).astype(np.uint8)

    @classmethod
    def from_template(cls, template) -> "Description":
        a = np.asarray(template)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2 == 0:
            raise ValueError(f"template must be square with odd side, got shape {a.shape}")
        r = (a.shape[0] - 1) // 2
        code = 0
        for i, v in enumerate(a.reshape(-1).tolist()):
            if v not in (0, 1):
                raise ValueError("template values must be 0 or 1")
            code |= int(v) << i
        return cls(r, code)

    def matches_probability(self, p: float) -> float:
        """Probability p**k (1-p)**h that an independent ball shows this coloring."""
        return _binomial_weight(p, self.k, self.h)


def _binomial_weight(p: float, k: int, h: int) -> float:
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if h == 0 else 0.0
    return math.exp(k * math.log(p) + h * math.log1p(-p))


class DescriptionSet:
    """Set of same-radius descriptions, packed over coloring codes."""

    def __init__(self, r: int, table: np.ndarray):
        if len(table) != bs.word_count(_cells(r)):
            raise ValueError("table length does not match radius")
        self.r = r
        self.cells = _cells(r)
        table = table.astype(np.uint64, copy=True)
        table.flags.writeable = False
        self.table = table
        self._count: Optional[int] = None
        self._hist: Optional[np.ndarray] = None
        self._and_or: Optional[tuple[int, int]] = None
        self._min_black: Optional[int] = None

    @classmethod
    def from_descriptions(cls, r: int, descs) -> "DescriptionSet":
        return cls(r, bs.from_codes(_cells(r), (d.code for d in descs)))

    @classmethod
    def empty(cls, r: int) -> "DescriptionSet":
        return cls(r, bs.constant_table(_cells(r), False))

    @classmethod
    def complete(cls, r: int) -> "DescriptionSet":
        return cls(r, bs.constant_table(_cells(r), True))

    def __len__(self) -> int:
        if self._count is None:
            self._count = bs.count(self.table)
        return self._count

    def __contains__(self, d: Description) -> bool:
        return d.r == self.r and bs.test(self.table, d.code)

    def __iter__(self) -> Iterator[Description]:
        # Beware: radius-2 sets can hold millions of members.
        for codes in bs.iter_code_chunks(self.table):
            for code in codes.tolist():
                yield Description(self.r, code)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DescriptionSet):
            return NotImplemented
        return self.r == other.r and bool(np.array_equal(self.table, other.table))

    def __repr__(self) -> str:
        return f"DescriptionSet(r={self.r}, size={len(self)})"

    def black_histogram(self) -> np.ndarray:
        """Member count per black-cell count; index k, length cells+1."""
        if self._hist is None:
            self._hist = bs.black_histogram(self.table, self.cells)
        return self._hist.copy()

    def min_black(self) -> Optional[int]:
        """Smallest black-cell count over members; None when empty."""
        if len(self) == 0:
            return None
        if self._min_black is None:
            self._min_black = self._find_min_black()
        return self._min_black

    def _find_min_black(self) -> int:
        if self._hist is not None:
            return int(np.flatnonzero(self._hist)[0])
        # Typical local conditions pin only a few black cells; probe small
        # counts directly before paying for a full popcount scan.
        for k in range(0, min(self.cells, 4) + 1):
            for picks in combinations(range(self.cells), k):
                if bs.test(self.table, sum(1 << i for i in picks)):
                    return k
        return int(np.flatnonzero(self.black_histogram())[0])

    def minimal_description(self) -> Description:
        """Canonical min-black member: smallest code among those of minimal count."""
        k = self.min_black()
        if k is None:
            raise InputError("empty description set has no minimal member")
        code = bs.first_code_with_popcount(self.table, k)
        assert code is not None
        return Description(self.r, code)

    def match_probability(self, p: float) -> float:
        """Probability that an independently colored ball matches some member."""
        if len(self) == 0:
            return 0.0
        if p == 0.0:
            return float(self.black_histogram()[0] > 0)
        if p == 1.0:
            return float(self.black_histogram()[self.cells] > 0)
        hist = self.black_histogram()
        lp, lq = math.log(p), math.log1p(-p)
        return math.fsum(
            count * math.exp(k * lp + (self.cells - k) * lq)
            for k, count in enumerate(hist.tolist())
            if count
        )

    @property
    def required_black(self) -> int:
        """Cell mask black in every member (identity mask when empty)."""
        if self._and_or is None:
            self._and_or = bs.reduce_and_or(self.table, self.cells)
        return self._and_or[0]

    @property
    def required_white(self) -> int:
        """Cell mask white in every member."""
        if self._and_or is None:
            self._and_or = bs.reduce_and_or(self.table, self.cells)
        full = (1 << self.cells) - 1
        return full & ~self._and_or[1]

    def is_subcube(self) -> bool:
        """True when membership is exactly 'required cells fixed, rest free'."""
        if len(self) == 0:
            return False
        free = self.cells - self.required_black.bit_count() - self.required_white.bit_count()
        return len(self) == 1 << free


@dataclass(frozen=True)
class PatternSentence:
    """m fixed ball colorings at pairwise torus distance > 2r."""

    r: int
    slots: tuple[Description, ...]

    def __init__(self, r: int, slots: Sequence[Description]):
        slots = tuple(slots)
        if not slots:
            raise ValueError("a pattern sentence needs at least one slot")
        if any(d.r != r for d in slots):
            raise ValueError("all slots must share the sentence radius")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "slots", slots)

    @property
    def m(self) -> int:
        return len(self.slots)

    def to_factored(self) -> "FactoredPattern":
        return FactoredPattern(self.r, [DescriptionSet.from_descriptions(self.r, [d]) for d in self.slots])


@dataclass(frozen=True)
class BasicLocalSentence:
    """m centers at pairwise distance > 2r, each satisfying a ball-local formula."""

    r: int
    psis: tuple[Formula, ...]

    def __init__(self, r: int, psis: Sequence[Formula]):
        psis = tuple(parse(f) if isinstance(f, str) else f for f in psis)
        if not psis:
            raise ValueError("a basic local sentence needs at least one local formula")
        for f in psis:
            if len(free_variables(f)) != 1:
                raise InputError(
                    f"local formula must have exactly one free variable: {to_text(f)}"
                )
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "psis", psis)

    @property
    def m(self) -> int:
        return len(self.psis)

    def color_swapped(self) -> "BasicLocalSentence":
        from .folang import color_swap

        return BasicLocalSentence(self.r, [color_swap(f) for f in self.psis])

    def to_json_doc(self) -> dict:
        return {"r": self.r, "psis": [to_text(f) for f in self.psis]}

    @classmethod
    def from_json_doc(cls, doc: dict) -> "BasicLocalSentence":
        try:
            r = int(doc["r"])
            psis = list(doc["psis"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"local sentence document needs 'r' and 'psis': {exc}") from exc
        return cls(r, psis)


class FactoredPattern:
    """Pattern with one description set per slot; same meaning as the
    disjunction of all slot combinations, never materialized."""

    def __init__(self, r: int, slot_sets: Sequence[DescriptionSet]):
        slot_sets = list(slot_sets)
        if not slot_sets:
            raise ValueError("a factored pattern needs at least one slot")
        if any(s.r != r for s in slot_sets):
            raise ValueError("all slot sets must share the pattern radius")
        self.r = r
        self.slot_sets = slot_sets

    @property
    def m(self) -> int:
        return len(self.slot_sets)

    def __repr__(self) -> str:
        return f"FactoredPattern(r={self.r}, slots={[len(s) for s in self.slot_sets]})"


# ---------------------------------------------------------------------------
# Matching on the torus

def match_description(img: Image, d: Description, x) -> bool:
    """Does the ball of radius r at x show exactly this coloring?"""
    _require_matchable(img.n, d.r)
    geom = TorusGeometry(img.n)
    pix = img.pixels
    for i, off in enumerate(ball_offsets(d.r)):
        row, col = geom.wrap_add(Pixel(*x), off)
        if int(pix[row, col]) != ((d.code >> i) & 1):
            return False
    return True


def _words_at(pixels: np.ndarray, r: int, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    n = pixels.shape[0]
    words = np.zeros(rows.shape, dtype=np.uint32)
    for i, (dr, dc) in enumerate(ball_offsets(r)):
        words |= pixels[(rows + dr) % n, (cols + dc) % n].astype(np.uint32) << np.uint32(i)
    return words


def _mask_offsets(mask: int, r: int) -> list[tuple[int, int]]:
    offs = ball_offsets(r)
    return [offs[i] for i in range(_cells(r)) if (mask >> i) & 1]


def _sparse_candidates(img: Image, dset: DescriptionSet) -> Optional[np.ndarray]:
    """Matching centers derived from the black pixels.

    Every member needs the ``required_black`` cells black, so any matching
    center sits at a fixed offset from some black pixel; with few black
    pixels that candidate list is tiny. Returns None when a full scan is
    the better plan (no required black cell, or a dense image).
    """
    req = dset.required_black
    if req == 0:
        return None
    n = img.n
    pix = img.pixels
    blacks = np.flatnonzero(pix)
    if blacks.size >= n * n // 4:
        return None
    if blacks.size == 0:
        return np.empty(0, dtype=np.int32)
    offs = _mask_offsets(req, dset.r)
    anchor_dr, anchor_dc = offs[0]
    rows = (blacks // n - anchor_dr) % n
    cols = (blacks % n - anchor_dc) % n
    if dset.is_subcube():
        # Membership is exactly "required cells fixed, others free".
        ok = np.ones(rows.shape, dtype=bool)
        for dr, dc in offs[1:]:
            ok &= pix[(rows + dr) % n, (cols + dc) % n] == 1
        for dr, dc in _mask_offsets(dset.required_white, dset.r):
            ok &= pix[(rows + dr) % n, (cols + dc) % n] == 0
    else:
        words = _words_at(pix, dset.r, rows, cols)
        bits = (
            dset.table[words >> np.uint32(6)]
            >> (words & np.uint32(63)).astype(np.uint64)
        ) & np.uint64(1)
        ok = bits != 0
    return (rows[ok] * n + cols[ok]).astype(np.int32)


def _slot_candidates(img: Image, dset: DescriptionSet) -> np.ndarray:
    cand = _sparse_candidates(img, dset)
    if cand is None:
        cand = kernels.member_centers(img.pixels, dset.r, dset.table)
    return cand


def _slot_has_match(img: Image, dset: DescriptionSet) -> bool:
    cand = _sparse_candidates(img, dset)
    if cand is not None:
        return cand.size > 0
    return kernels.first_member_center(img.pixels, dset.r, dset.table) >= 0


def match_factored(img: Image, fp: FactoredPattern | PatternSentence) -> bool:
    """Exact torus matching of a factored pattern.

    True iff centers x_1..x_m exist at pairwise distance > 2r with each
    ball coloring a member of its slot set. An empty slot set makes the
    sentence unsatisfiable (False, not an error).
    """
    if isinstance(fp, PatternSentence):
        fp = fp.to_factored()
    _require_matchable(img.n, fp.r)
    if any(len(s) == 0 for s in fp.slot_sets):
        return False
    if fp.m == 1:
        return _slot_has_match(img, fp.slot_sets[0])

    candidates = [_slot_candidates(img, s) for s in fp.slot_sets]
    if any(c.size == 0 for c in candidates):
        return False
    order = sorted(range(fp.m), key=lambda i: candidates[i].size)
    geom = TorusGeometry(img.n)
    n, limit = img.n, 2 * fp.r
    pools = [[Pixel(int(v) // n, int(v) % n) for v in candidates[i]] for i in order]

    chosen: list[Pixel] = []

    def backtrack(level: int) -> bool:
        if level == len(pools):
            return True
        for p in pools[level]:
            if all(geom.distance(p, q) > limit for q in chosen):
                chosen.append(p)
                if backtrack(level + 1):
                    return True
                chosen.pop()
        return False

    return backtrack(0)


# ---------------------------------------------------------------------------
# Ball-restricted evaluation (plain subgrid, no wrap)

class BallStructure:
    """The (2r+1) x (2r+1) ball as a plain-grid structure for one coloring.

    Relations do not wrap; distance is plain Chebyshev. Quantifiers range
    over the ball cells. Cell (r, r) is the center.
    """

    def __init__(self, r: int, code: int):
        side = 2 * r + 1
        self.r = r
        self.side = side
        self.code = code
        self.domain = tuple((i, j) for i in range(side) for j in range(side))

    def color(self, cell) -> bool:
        return bool((self.code >> (cell[0] * self.side + cell[1])) & 1)

    def rel(self, kind: str, a, b) -> bool:
        off = REL_OFFSETS[kind]
        return b[0] == a[0] + off[0] and b[1] == a[1] + off[1]

    def dist_gt(self, a, b, bound: int) -> bool:
        return max(abs(a[0] - b[0]), abs(a[1] - b[1])) > bound


def center_cell(r: int) -> tuple[int, int]:
    return (r, r)


class _BallRelations:
    """Geometry-only view of the ball used by the vectorized enumerator."""

    def __init__(self, r: int):
        self.side = 2 * r + 1
        self.domain = tuple((i, j) for i in range(self.side) for j in range(self.side))

    def rel(self, kind: str, a, b) -> bool:
        off = REL_OFFSETS[kind]
        return b[0] == a[0] + off[0] and b[1] == a[1] + off[1]

    def dist_gt(self, a, b, bound: int) -> bool:
        return max(abs(a[0] - b[0]), abs(a[1] - b[1])) > bound


def _tt_not(v):
    return (not v) if isinstance(v, bool) else np.bitwise_not(v)


def _tt_and(l, r):
    if isinstance(l, bool):
        return r if l else False
    if isinstance(r, bool):
        return l if r else False
    return l & r


def _tt_or(l, r):
    if isinstance(l, bool):
        return True if l else r
    if isinstance(r, bool):
        return True if r else l
    return l | r


def _tt_iff(l, r):
    if isinstance(l, bool):
        return r if l else _tt_not(r)
    if isinstance(r, bool):
        return l if r else _tt_not(l)
    return np.bitwise_not(l ^ r)


def _tt_eval(node: Formula, env: dict, ball: _BallRelations, cells: int):
    """Evaluate over all 2**cells ball colorings at once.

    Returns a packed truth table (one bit per coloring code) or a plain
    bool when the value does not depend on colors. Geometric atoms fold to
    constants, so quantifier loops skip most bindings without array work.
    Padding bits of intermediate tables may be dirty; callers mask at the
    end.
    """
    if isinstance(node, Color):
        cell = env[node.var]
        return bs.atom_table(cells, cell[0] * ball.side + cell[1])
    if isinstance(node, Rel):
        return ball.rel(node.kind, env[node.a], env[node.b])
    if isinstance(node, Eq):
        return env[node.a] == env[node.b]
    if isinstance(node, DistGt):
        return ball.dist_gt(env[node.a], env[node.b], node.bound)
    if isinstance(node, Not):
        return _tt_not(_tt_eval(node.body, env, ball, cells))
    if isinstance(node, And):
        left = _tt_eval(node.left, env, ball, cells)
        if left is False:
            return False
        return _tt_and(left, _tt_eval(node.right, env, ball, cells))
    if isinstance(node, Or):
        left = _tt_eval(node.left, env, ball, cells)
        if left is True:
            return True
        return _tt_or(left, _tt_eval(node.right, env, ball, cells))
    if isinstance(node, Implies):
        left = _tt_eval(node.left, env, ball, cells)
        if left is False:
            return True
        return _tt_or(_tt_not(left), _tt_eval(node.right, env, ball, cells))
    if isinstance(node, Iff):
        return _tt_iff(
            _tt_eval(node.left, env, ball, cells),
            _tt_eval(node.right, env, ball, cells),
        )
    if isinstance(node, (Forall, Exists)):
        want_exists = isinstance(node, Exists)
        acc: object = not want_exists
        old = env.get(node.var, None)
        had = node.var in env
        try:
            for cell in ball.domain:
                env[node.var] = cell
                value = _tt_eval(node.body, env, ball, cells)
                if want_exists:
                    acc = _tt_or(acc, value)
                    if acc is True:
                        return True
                else:
                    acc = _tt_and(acc, value)
                    if acc is False:
                        return False
            return acc
        finally:
            if had:
                env[node.var] = old
            else:
                env.pop(node.var, None)
    raise TypeError(f"not a formula: {node!r}")


def descriptions_implying(
    psi: Formula | str,
    r: int,
    max_cells: int = DEFAULT_MAX_BALL_CELLS,
) -> DescriptionSet:
    """All radius-r ball colorings whose ball satisfies psi at the center.

    psi must have exactly one free variable, bound to the center cell; its
    quantifiers range over the ball as a plain subgrid. The empty set means
    psi is unsatisfiable within this radius.
    """
    if isinstance(psi, str):
        psi = parse(psi)
    free = free_variables(psi)
    if len(free) != 1:
        raise InputError(f"expected exactly one free variable, found {len(free)}: {to_text(psi)}")
    cells = _cells(r)
    if cells > min(max_cells, _HARD_CELL_CAP):
        raise RadiusTooLarge(
            f"ball has {cells} cells; enumeration capped at {min(max_cells, _HARD_CELL_CAP)}"
        )
    (var,) = free
    result = _tt_eval(psi, {var: center_cell(r)}, _BallRelations(r), cells)
    if isinstance(result, bool):
        return DescriptionSet(r, bs.constant_table(cells, result))
    return DescriptionSet(r, bs.mask_valid(result, cells))


def factor(sentence: BasicLocalSentence, max_cells: int = DEFAULT_MAX_BALL_CELLS) -> FactoredPattern:
    """Factored form: one description set per local formula; same meaning."""
    return FactoredPattern(
        sentence.r,
        [descriptions_implying(psi, sentence.r, max_cells) for psi in sentence.psis],
    )


def index(sentence: BasicLocalSentence, max_cells: int = DEFAULT_MAX_BALL_CELLS) -> int | float:
    """max over slots of the minimal black count realizing that slot.

    Infinity when some slot is unsatisfiable within the radius (the whole
    sentence then has probability zero).
    """
    mins = []
    for dset in factor(sentence, max_cells).slot_sets:
        k = dset.min_black()
        if k is None:
            return math.inf
        mins.append(k)
    return max(mins)


# ---------------------------------------------------------------------------
# Horizontally chained descriptions

class HorizontalBlock:
    """m ball colorings in consecutive, adjacent balls along the R direction.

    An appearance anywhere on the torus implies the pattern sentence with
    the same slots: chained centers sit at distance 2r+1 > 2r apart. The
    chain follows the first (row) coordinate, the direction of relation R.
    """

    def __init__(self, descs: Sequence[Description]):
        descs = tuple(descs)
        if not descs:
            raise ValueError("need at least one description")
        r = descs[0].r
        if any(d.r != r for d in descs):
            raise ValueError("all descriptions must share one radius")
        self.descs = descs
        self.r = r
        self.side = 2 * r + 1
        self.m = len(descs)
        self.black_total = sum(d.k for d in descs)
        self.white_total = sum(d.h for d in descs)

    @property
    def template(self) -> np.ndarray:
        """(m*(2r+1), 2r+1) array; first index runs along the chain."""
        return np.concatenate([d.template for d in self.descs], axis=0)

    @property
    def height(self) -> int:
        """Extent perpendicular to the chain: 2r+1."""
        return self.side

    @property
    def width(self) -> int:
        """Extent along the chain: m*(2r+1)."""
        return self.m * self.side

    def cell_values(self) -> list[tuple[tuple[int, int], int]]:
        """(offset from the first center, color) for every block cell."""
        out = []
        for i, d in enumerate(self.descs):
            for j, (dr, dc) in enumerate(ball_offsets(self.r)):
                out.append(((dr + i * self.side, dc), (d.code >> j) & 1))
        return out

    def occurrence_probability(self, p: float) -> float:
        """Probability the block appears at one fixed anchor: p**K (1-p)**H."""
        return _binomial_weight(p, self.black_total, self.white_total)

    def matches_at(self, img: Image, anchor) -> bool:
        self._check_size(img.n)
        geom = TorusGeometry(img.n)
        pix = img.pixels
        for off, val in self.cell_values():
            row, col = geom.wrap_add(Pixel(*anchor), off)
            if int(pix[row, col]) != val:
                return False
        return True

    def matches(self, img: Image) -> bool:
        """Does the block appear anywhere on the torus?"""
        self._check_size(img.n)
        n = img.n
        acc = np.ones((n, n), dtype=bool)
        for (dr, dc), val in self.cell_values():
            acc &= np.roll(img.pixels, (-dr % n, -dc % n), axis=(0, 1)) == val
            if not acc.any():
                return False
        return True

    def to_pattern(self) -> PatternSentence:
        return PatternSentence(self.r, self.descs)

    def _check_size(self, n: int) -> None:
        if n < self.m * self.side:
            raise ImageTooSmall(f"torus side {n} < chain length {self.m * self.side}")


def concat_horizontal(descs: Sequence[Description]) -> HorizontalBlock:
    """Chain same-radius descriptions into one rectangular block."""
    return HorizontalBlock(descs)


# ---------------------------------------------------------------------------
# Serialization

def description_to_pbm(d: Description) -> bytes:
    """Plain PBM of the template with an informational radius comment."""
    side = 2 * d.r + 1
    lines = [b"P1", f"# radius {d.r}".encode(), f"{side} {side}".encode()]
    for row in d.template:
        lines.append(" ".join(str(int(v)) for v in row).encode())
    return b"\n".join(lines) + b"\n"


def description_from_pbm(data: bytes | str) -> Description:
    from .image import read_pbm

    img = read_pbm(data)
    if img.n % 2 == 0:
        raise MalformedPBM(f"description template side must be odd, got {img.n}")
    return Description.from_template(img.pixels)


def factored_to_json(fp: FactoredPattern, limit: int = MAX_JSON_DESCRIPTIONS) -> str:
    """JSON document {r, templates, slots}; slots reference template ids.

    Refuses sets larger than ``limit`` members: the JSON form is meant for
    hand-curated patterns, not for factored radius-2 formulas.
    """
    for i, s in enumerate(fp.slot_sets):
        if len(s) > limit:
            raise ResourceError(
                f"slot {i} has {len(s)} descriptions; JSON serialization capped at {limit}"
            )
    templates: dict[int, str] = {}
    slots = []
    for s in fp.slot_sets:
        ids = []
        for d in s:
            if d.code not in templates:
                templates[d.code] = f"t{len(templates)}"
            ids.append(templates[d.code])
        slots.append(ids)
    side = 2 * fp.r + 1
    template_bits = {
        name: format(code, f"0{side * side}b")[::-1] for code, name in templates.items()
    }
    return json.dumps({"r": fp.r, "templates": template_bits, "slots": slots}, sort_keys=True)


def factored_from_json(doc: str | dict) -> FactoredPattern:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        r = int(doc["r"])
        templates = doc["templates"]
        slots = doc["slots"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"factored pattern document needs 'r', 'templates', 'slots': {exc}") from exc
    cells = _cells(r)
    codes: dict[str, int] = {}
    for name, bits in templates.items():
        if len(bits) != cells or set(bits) - {"0", "1"}:
            raise InputError(f"template {name!r} must be {cells} bits of 0/1")
        codes[name] = int(bits[::-1], 2)
    slot_sets = []
    for ids in slots:
        try:
            slot_sets.append(
                DescriptionSet.from_descriptions(r, [Description(r, codes[i]) for i in ids])
            )
        except KeyError as exc:
            raise InputError(f"slot references unknown template {exc}") from exc
    return FactoredPattern(r, slot_sets)
