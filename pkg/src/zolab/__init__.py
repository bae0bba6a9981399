"""zolab: a desk-scale laboratory for random binary images.

Random n x n images with independent pixels, first-order sentences over
them, ball descriptions and basic local sentences, occurrence thresholds,
and 6-connected percolation crossings; everything checkable by exact
enumeration, closed forms, or seeded Monte Carlo.
"""

from . import kernels
from .errors import ZolabError
from .folang import evaluate, parse
from .grid import Pixel, TorusGeometry
from .image import Image, SampleSpec, parity_probability, read_pbm, sample, write_pbm
from .local import (
    BasicLocalSentence,
    Description,
    DescriptionSet,
    FactoredPattern,
    HorizontalBlock,
    PatternSentence,
    concat_horizontal,
    descriptions_implying,
    factor,
    index,
    match_description,
    match_factored,
)
from .percolation import BLR, WTB, CrossingSpec, crosses, duality_check
from .thresholds import (
    EstimateResult,
    Limit,
    ParityTarget,
    PatternBounds,
    PowerLawRate,
    classify,
    estimate,
    exact_probability,
    pattern_bounds,
    sweep,
    threshold_exponent,
    wilson_interval,
)

__version__ = "0.1.0"

kernel_backend = kernels.backend
