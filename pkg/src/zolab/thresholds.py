"""Occurrence-probability bounds, threshold exponents, limit classification,
exact probability by enumeration, and seeded Monte Carlo estimation.

Targets accepted throughout: a first-order sentence (AST or text), a
pattern in any form (description, pattern sentence, basic local sentence,
factored pattern), a crossing spec, a parity predicate, or any callable
``Image -> bool``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.stats import binom

from . import folang, local, percolation
from .errors import TooLargeToEnumerate, UnsupportedRate
from .image import Image, black_count, sample_replicate
from .local import (
    BasicLocalSentence,
    Description,
    FactoredPattern,
    PatternSentence,
    _require_matchable,
)

HARD_MAX_ENUM_N = 5  # 2**25 images; beyond this enumeration is hopeless
DEFAULT_MAX_ENUM_N = 4
DEFAULT_SAMPLES = 10_000

_WILSON_Z = 1.959963984540054  # two-sided 95%


# ---------------------------------------------------------------------------
# Targets

@dataclass(frozen=True)
class ParityTarget:
    """Predicate 'the number of pixels of this color is even' (or odd).

    Not expressible in the first-order language; provided as a named target
    because its exact probability has a closed form to test against.
    """

    color: str = "black"  # "black" | "white"
    even: bool = True

    def __post_init__(self):
        if self.color not in ("black", "white"):
            raise ValueError("color must be 'black' or 'white'")

    def check(self, img: Image) -> bool:
        count = black_count(img) if self.color == "black" else img.n * img.n - black_count(img)
        return (count % 2 == 0) == self.even


Target = Union[
    str,
    folang.Formula,
    Description,
    PatternSentence,
    BasicLocalSentence,
    FactoredPattern,
    percolation.CrossingSpec,
    ParityTarget,
    Callable[[Image], bool],
]


def compile_target(target: Target, work_budget: int = folang.DEFAULT_WORK_BUDGET) -> Callable[[Image], bool]:
    """Normalize any supported target into an ``Image -> bool`` checker."""
    if isinstance(target, str):
        target = folang.parse(target)
    if isinstance(target, folang.Formula):
        folang.check_sentence(target)
        sentence = target
        return lambda img: folang.evaluate(img, sentence, work_budget=work_budget)
    if isinstance(target, Description):
        target = PatternSentence(target.r, [target])
    if isinstance(target, BasicLocalSentence):
        target = local.factor(target)
    if isinstance(target, PatternSentence):
        target = target.to_factored()
    if isinstance(target, FactoredPattern):
        fp = target
        return lambda img: local.match_factored(img, fp)
    if isinstance(target, percolation.CrossingSpec):
        spec = target
        return lambda img: percolation.crosses(img, spec)
    if isinstance(target, ParityTarget):
        return target.check
    if callable(target):
        return target
    raise TypeError(f"unsupported target: {target!r}")


def color_swapped_target(target: Target) -> Target:
    """Exchange black and white in a target (where that makes sense)."""
    if isinstance(target, str):
        target = folang.parse(target)
    if isinstance(target, folang.Formula):
        return folang.color_swap(target)
    if isinstance(target, BasicLocalSentence):
        return target.color_swapped()
    if isinstance(target, ParityTarget):
        return ParityTarget("white" if target.color == "black" else "black", target.even)
    if isinstance(target, percolation.CrossingSpec):
        other = (
            percolation.PathColor.WHITE
            if target.color is percolation.PathColor.BLACK
            else percolation.PathColor.BLACK
        )
        return percolation.CrossingSpec(other, target.direction)
    raise TypeError(f"no color swap defined for target {target!r}")


def _as_factored(target: Target) -> Optional[FactoredPattern]:
    if isinstance(target, Description):
        target = PatternSentence(target.r, [target])
    if isinstance(target, BasicLocalSentence):
        target = local.factor(target)
    if isinstance(target, PatternSentence):
        target = target.to_factored()
    return target if isinstance(target, FactoredPattern) else None


# ---------------------------------------------------------------------------
# Rates and limits

@dataclass(frozen=True)
class PowerLawRate:
    """Pixel probability schedule p(n) = min(c * n**-alpha, 1/2).

    The model is black/white symmetric, so only p <= 1/2 is ever needed;
    the clip at 1/2 makes that explicit. alpha may be a Fraction for exact
    threshold-point comparisons.
    """

    c: float = 1.0
    alpha: Union[float, Fraction] = 0.0

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("coefficient c must be > 0")
        if self.alpha < 0:
            raise ValueError("exponent alpha must be >= 0")

    def p(self, n: int) -> float:
        return min(self.c * float(n) ** -float(self.alpha), 0.5)


class Limit(Enum):
    ZERO = "ZERO"
    ONE = "ONE"
    INDETERMINATE = "INDETERMINATE"


class ThresholdKind(Enum):
    POWER_LAW = "POWER_LAW"
    ALWAYS_ONE = "ALWAYS_ONE"
    UNSAT = "UNSAT"


@dataclass(frozen=True)
class ThresholdExponent:
    kind: ThresholdKind
    exponent: Optional[Fraction]  # alpha with threshold p(n) = n**-alpha


def _pattern_index(target: Target, max_cells: int = local.DEFAULT_MAX_BALL_CELLS) -> Union[int, float]:
    if isinstance(target, BasicLocalSentence):
        return local.index(target, max_cells)
    fp = _as_factored(target)
    if fp is None:
        raise TypeError(f"index needs a pattern-family target, got {target!r}")
    mins = []
    for dset in fp.slot_sets:
        k = dset.min_black()
        if k is None:
            return math.inf
        mins.append(k)
    return max(mins)


def threshold_exponent(
    target: Target, max_cells: int = local.DEFAULT_MAX_BALL_CELLS
) -> ThresholdExponent:
    """Exponent a with threshold p(n) = n**-a, from the sentence index.

    A sentence of index k has threshold n**-(2/k). Index 0 means the
    probability tends to one for every p(n) <= 1/2; an unsatisfiable
    sentence has no threshold at all.
    """
    k = _pattern_index(target, max_cells)
    if k == math.inf:
        return ThresholdExponent(ThresholdKind.UNSAT, None)
    if k == 0:
        return ThresholdExponent(ThresholdKind.ALWAYS_ONE, None)
    return ThresholdExponent(ThresholdKind.POWER_LAW, Fraction(2, int(k)))


def classify(
    target: Target,
    rate: PowerLawRate,
    max_cells: int = local.DEFAULT_MAX_BALL_CELLS,
) -> Limit:
    """Limiting probability under p(n) = min(c n**-alpha, 1/2).

    Comparisons against the threshold exponent 2/k are exact over the
    rationals: pass alpha as a Fraction to hit a threshold point exactly.
    Fixed rates (alpha = 0) give limit ONE for every satisfiable sentence.
    """
    if not isinstance(rate, PowerLawRate):
        raise UnsupportedRate(f"expected a PowerLawRate, got {rate!r}")
    k = _pattern_index(target, max_cells)
    if k == math.inf:
        return Limit.ZERO
    if k == 0:
        return Limit.ONE
    alpha = Fraction(rate.alpha)
    threshold = Fraction(2, int(k))
    if alpha == 0:
        return Limit.ONE
    if alpha > threshold:
        return Limit.ZERO
    if alpha < threshold:
        return Limit.ONE
    return Limit.INDETERMINATE


# ---------------------------------------------------------------------------
# Certified occurrence bounds

@dataclass(frozen=True)
class PatternBounds:
    """Certified sandwich lower <= occurrence probability <= upper.

    ``lower`` uses the disjoint-ball tiling exactly; ``lower_exp`` is the
    weaker exponential form of the same bound (single-slot patterns only).
    """

    lower: float
    upper: float
    lower_exp: Optional[float] = None


def pattern_bounds(n: int, p: float, target: Target) -> PatternBounds:
    """Bounds on the probability that a pattern appears in a random image.

    Upper: the anchored union bound n**2 * P[one ball matches the slot],
    minimized over slots. Lower, one slot: a match inside the disjoint-ball
    tiling, 1 - (1 - P)**tau over tau independent balls. Lower, several
    slots: every distinct slot-minimal ball coloring occurs at least m
    times on the tiling, via exact binomial tails.
    """
    fp = _as_factored(target)
    if fp is None:
        raise TypeError(f"bounds need a pattern-family target, got {target!r}")
    _require_matchable(n, fp.r)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    tau = (n // (2 * fp.r + 1)) ** 2
    slot_probs = [s.match_probability(p) for s in fp.slot_sets]
    if any(q == 0.0 for q in slot_probs):
        return PatternBounds(lower=0.0, upper=0.0, lower_exp=0.0 if fp.m == 1 else None)
    upper = min(1.0, min(n * n * q for q in slot_probs))
    if fp.m == 1:
        q = slot_probs[0]
        if q >= 1.0:
            lower, lower_exp = 1.0 if tau > 0 else 0.0, -math.expm1(-tau)
        else:
            lower = -math.expm1(tau * math.log1p(-q))
            lower_exp = -math.expm1(-tau * q)
        return PatternBounds(lower=lower, upper=upper, lower_exp=lower_exp)

    # Deduplicated canonical minimal colorings, as in the multi-slot
    # tiling argument; a tile ball shows at most one of them.
    chosen = {s.minimal_description().code: s.minimal_description() for s in fp.slot_sets}
    miss = 0.0
    for d in chosen.values():
        miss += float(binom.cdf(fp.m - 1, tau, d.matches_probability(p)))
    return PatternBounds(lower=max(0.0, 1.0 - miss), upper=upper, lower_exp=None)


# ---------------------------------------------------------------------------
# Exact probability by exhaustive enumeration

def satisfying_profile(
    target: Target,
    n: int,
    max_enum_n: int = DEFAULT_MAX_ENUM_N,
    work_budget: int = folang.DEFAULT_WORK_BUDGET,
) -> np.ndarray:
    """Count satisfying images grouped by black count; index k, length n*n+1.

    This is the ground-truth oracle: it visits all 2**(n*n) images.
    """
    if n > min(max_enum_n, HARD_MAX_ENUM_N):
        raise TooLargeToEnumerate(
            f"2**{n * n} images; enumeration capped at side {min(max_enum_n, HARD_MAX_ENUM_N)}"
        )
    checker = compile_target(target, work_budget)
    counts = np.zeros(n * n + 1, dtype=np.int64)
    for code in range(1 << (n * n)):
        if checker(Image.from_int(n, code)):
            counts[code.bit_count()] += 1
    return counts


def exact_probability(
    target: Target,
    n: int,
    p: float,
    max_enum_n: int = DEFAULT_MAX_ENUM_N,
    work_budget: int = folang.DEFAULT_WORK_BUDGET,
) -> float:
    """Sum of image probabilities over all satisfying images of side n."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    counts = satisfying_profile(target, n, max_enum_n, work_budget)
    cells = n * n
    return math.fsum(
        count * local._binomial_weight(p, k, cells - k)
        for k, count in enumerate(counts.tolist())
        if count
    )


# ---------------------------------------------------------------------------
# Monte Carlo estimation

def wilson_interval(hits: int, samples: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """95% Wilson score interval; well-behaved at proportions near 0 and 1."""
    if samples <= 0:
        return (0.0, 1.0)
    phat = hits / samples
    denom = 1.0 + z * z / samples
    center = (phat + z * z / (2 * samples)) / denom
    margin = (z / denom) * math.sqrt(phat * (1.0 - phat) / samples + z * z / (4.0 * samples * samples))
    return (max(0.0, center - margin), min(1.0, center + margin))


@dataclass(frozen=True)
class EstimateResult:
    n: int
    p: float
    samples: int
    hits: int
    phat: float
    ci_low: float
    ci_high: float
    seed: int


def estimate(
    target: Target,
    n: int,
    p: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    work_budget: int = folang.DEFAULT_WORK_BUDGET,
) -> EstimateResult:
    """Monte Carlo estimate of the satisfaction probability.

    Replicate i draws its image from a stream derived from (seed, i), so
    the result does not depend on how replicates are scheduled.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    checker = compile_target(target, work_budget)
    hits = 0
    for i in range(samples):
        if checker(sample_replicate(n, p, seed, i)):
            hits += 1
    ci_low, ci_high = wilson_interval(hits, samples)
    return EstimateResult(
        n=n, p=p, samples=samples, hits=hits, phat=hits / samples,
        ci_low=ci_low, ci_high=ci_high, seed=seed,
    )


# ---------------------------------------------------------------------------
# Threshold sweeps

@dataclass(frozen=True)
class SweepRow:
    n: int
    p: float
    samples: int
    hits: int
    phat: float
    ci_low: float
    ci_high: float
    lower_bound: Optional[float]
    upper_bound: Optional[float]
    classification: Optional[str]


SWEEP_CSV_HEADER = "n,p,samples,hits,phat,ci_low,ci_high,lower_bound,upper_bound,classification"


def sweep_row_csv(row: SweepRow) -> str:
    def fmt(v) -> str:
        return "" if v is None else (repr(v) if isinstance(v, float) else str(v))

    return ",".join(
        fmt(v)
        for v in (
            row.n, row.p, row.samples, row.hits, row.phat, row.ci_low,
            row.ci_high, row.lower_bound, row.upper_bound, row.classification,
        )
    )


def sweep(
    target: Target,
    rate: PowerLawRate,
    n_list: Sequence[int],
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    work_budget: int = folang.DEFAULT_WORK_BUDGET,
) -> list[SweepRow]:
    """Estimate the target at p(n) for each n, with bounds where defined.

    Pattern-family targets also get certified bounds and the limit
    classification; other targets leave those columns empty.
    """
    fp = _as_factored(target)
    classification = None
    if fp is not None:
        classification = classify(fp, rate).value
    rows = []
    for n in n_list:
        p = rate.p(n)
        est = estimate(fp if fp is not None else target, n, p, samples, seed, work_budget)
        lower = upper = None
        if fp is not None and n >= 2 * fp.r + 2:
            bounds = pattern_bounds(n, p, fp)
            lower, upper = bounds.lower, bounds.upper
        rows.append(
            SweepRow(
                n=n, p=p, samples=samples, hits=est.hits, phat=est.phat,
                ci_low=est.ci_low, ci_high=est.ci_high,
                lower_bound=lower, upper_bound=upper, classification=classification,
            )
        )
    return rows
