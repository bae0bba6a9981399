"""Image type, product-Bernoulli sampling, parity closed form, PBM round trips."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from zolab.errors import MalformedPBM, NonSquare
from zolab.image import (
    Image,
    SampleSpec,
    _sample_dense,
    _sample_sparse,
    black_count,
    complement,
    parity_probability,
    read_pbm,
    rng_for,
    sample,
    sample_replicate,
    write_pbm,
)


def test_sample_degenerate_levels():
    assert sample(SampleSpec(6, 0.0, 123)) == Image.solid(6, 0)
    assert sample(SampleSpec(6, 1.0, 123)) == Image.solid(6, 1)


def test_sample_is_pure_function_of_spec():
    a = sample(SampleSpec(16, 0.37, 99))
    b = sample(SampleSpec(16, 0.37, 99))
    c = sample(SampleSpec(16, 0.37, 100))
    assert a == b
    assert a != c


def test_replicates_are_independent_of_ordering():
    images = {i: sample_replicate(8, 0.4, 7, i) for i in (3, 0, 2, 1)}
    again = {i: sample_replicate(8, 0.4, 7, i) for i in (0, 1, 2, 3)}
    assert images == again
    assert len({img.to_int() for img in images.values()}) == 4


def test_mean_black_count_matches_binomial_moments():
    # n=64, p=0.5: mean over 10^4 seeds within 3 sigma of 2048 (sigma = 32)
    total = 0
    for seed in range(10_000):
        total += sample(SampleSpec(64, 0.5, seed)).black_count()
    mean = total / 10_000
    sigma = math.sqrt(4096 * 0.25)
    assert abs(mean - 2048) <= 3 * sigma / math.sqrt(10_000) * 100  # generous
    assert abs(mean - 2048) <= 3 * sigma


def test_empirical_pixel_mean_converges_to_p():
    n, p, runs = 16, 0.2, 2000
    total = sum(sample(SampleSpec(n, p, s)).black_count() for s in range(runs))
    phat = total / (runs * n * n)
    sigma = math.sqrt(p * (1 - p) / (runs * n * n))
    assert abs(phat - p) <= 4 * sigma


def test_complement_involution_and_counts():
    img = sample(SampleSpec(9, 0.5, 4))
    assert complement(complement(img)) == img
    assert complement(Image.solid(3, 0)) == Image.solid(3, 1)
    assert black_count(complement(img)) == 81 - black_count(img)


def test_black_count_trivials():
    assert black_count(Image.solid(4, 0)) == 0
    assert black_count(Image.solid(3, 1)) == 9
    one = np.zeros((5, 5), dtype=np.uint8)
    one[2, 3] = 1
    assert black_count(Image(one)) == 1


def test_int_round_trip():
    img = sample(SampleSpec(4, 0.5, 11))
    assert Image.from_int(4, img.to_int()) == img
    assert Image.from_int(3, 0) == Image.solid(3, 0)
    assert Image.from_int(2, 15) == Image.solid(2, 1)


def test_parity_probability_trivials():
    for p in (0.0, 0.2, 0.9):
        assert parity_probability(1, p) == pytest.approx(1 - p, abs=1e-15)
    for n in (1, 2, 5, 8):
        assert parity_probability(n, 0.5) == 0.5
    assert parity_probability(2, 0.3) == pytest.approx(0.5128, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.7])
def test_parity_probability_matches_enumeration(n, p):
    # independent oracle: sum the measure over all images with even popcount
    total = math.fsum(
        p ** code.bit_count() * (1 - p) ** (n * n - code.bit_count())
        for code in range(1 << (n * n))
        if code.bit_count() % 2 == 0
    )
    assert parity_probability(n, p) == pytest.approx(total, abs=1e-12)


def test_sparse_and_dense_paths_agree_in_distribution():
    # chi-square of both samplers against the exact 16-cell law at n=2
    n, p, runs = 2, 0.3, 20_000
    expected = np.array(
        [p ** c.bit_count() * (1 - p) ** (4 - c.bit_count()) for c in range(16)]
    )
    for sampler, seed in ((_sample_dense, 1), (_sample_sparse, 2)):
        rng = rng_for(seed)
        freq = np.zeros(16)
        for _ in range(runs):
            freq[sampler(n, p, rng).to_int()] += 1
        stat, pvalue = chisquare(freq, expected * runs)
        assert pvalue > 1e-6, (sampler.__name__, pvalue)


def test_write_pbm_canonical_bytes():
    assert write_pbm(Image.solid(2, 0)) == b"P1\n2 2\n0 0\n0 0\n"


@given(st.integers(1, 7), st.integers(0, 2**49 - 1))
@settings(max_examples=80)
def test_pbm_round_trip(n, code):
    img = Image.from_int(n, code % (1 << (n * n)))
    assert read_pbm(write_pbm(img)) == img


def test_pbm_reader_is_whitespace_tolerant():
    img = read_pbm(b"P1 # comment\n# more\n 2\t2\n0110")
    assert img == Image(np.array([[0, 1], [1, 0]]))
    assert read_pbm("P1\n3 3\n" + "0" * 9) == Image.solid(3, 0)


def test_pbm_reader_rejects_non_square():
    with pytest.raises(NonSquare):
        read_pbm(b"P1\n2 3\n000000")


@pytest.mark.parametrize(
    "data",
    [
        b"P2\n2 2\n0 0 0 0",
        b"P1\n2 2\n0 0 0",
        b"P1\n2 2\n0 0 0 0 1",
        b"P1\n2 2\n0 0 0 2",
        b"P1\n2",
        b"",
        b"P1\n0 0\n",
    ],
)
def test_pbm_reader_rejects_malformed(data):
    with pytest.raises(MalformedPBM):
        read_pbm(data)


def test_image_validation():
    with pytest.raises(ValueError):
        Image(np.array([[0, 2], [1, 0]]))
    with pytest.raises(ValueError):
        Image(np.zeros((2, 3), dtype=np.uint8))
    with pytest.raises(ValueError):
        SampleSpec(4, 1.5, 0)
    with pytest.raises(ValueError):
        SampleSpec(0, 0.5, 0)


def test_pixels_are_immutable():
    img = Image.solid(3, 0)
    with pytest.raises(ValueError):
        img.pixels[0, 0] = 1
