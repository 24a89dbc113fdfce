import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainent.chain import ChainSpec, build_kernel
from chainent.errors import SpectrumSourceError
from chainent.gaussian import BlockPair, extract_block, partial_transpose, union_state
from chainent.measures import (
    block_entropy,
    entropy,
    log_negativity,
    measure_pair,
    mutual_information,
    negativity,
    renyi_half_entropy,
)
from chainent.spectral import SpectrumSource, SymplecticSpectrum, symplectic_spectrum

# 30-digit values (mpmath) of the single-mode formulas at lambda = 1
ENTROPY_AT_ONE = 0.95477125244221922768
RENYI_AT_ONE = 1.8999686269529916978

K64 = build_kernel(ChainSpec(64, 0.9))


def plain(*v):
    return SymplecticSpectrum(np.array(v, dtype=float), SpectrumSource.PLAIN)


def transposed(*v):
    return SymplecticSpectrum(np.array(v, dtype=float), SpectrumSource.PARTIAL_TRANSPOSE)


def test_entropy_examples():
    assert entropy(plain(0.5)) == 0.0
    assert entropy(plain(1.0)) == pytest.approx(ENTROPY_AT_ONE, rel=1e-14)
    assert entropy(plain(0.5 - 5e-10)) == 0.0
    with pytest.raises(SpectrumSourceError):
        entropy(transposed(0.5))


def test_log_negativity_examples():
    assert log_negativity(transposed(0.5, 0.7, 3.0)) == 0.0
    assert log_negativity(transposed(0.25, 0.75)) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(SpectrumSourceError):
        log_negativity(plain(0.25))


def test_renyi_examples():
    assert renyi_half_entropy(plain(0.5)) == 0.0
    assert renyi_half_entropy(plain(1.0)) == pytest.approx(RENYI_AT_ONE, rel=1e-14)


def test_renyi_half_equals_negativity_on_pure_cut():
    n = 64
    k = K64
    half = list(range(n // 2))
    rest = list(range(n // 2, n))
    r = renyi_half_entropy(symplectic_spectrum(extract_block(k, half)))
    whole = partial_transpose(extract_block(k, range(n)), rest)
    e = log_negativity(symplectic_spectrum(whole))
    assert r > 0.1
    assert e == pytest.approx(r, abs=1e-6)


@pytest.mark.parametrize("n", [8, 64, 256, 512])
@pytest.mark.parametrize("a", [0.0, 0.5, 0.9, 1 - 1e-6])
def test_complement_symmetry(n, a):
    k = build_kernel(ChainSpec(n, a))
    for L in sorted({1, n // 4, n // 2}):
        inside = block_entropy(k, range(L))
        outside = block_entropy(k, range(L, n))
        assert inside == pytest.approx(outside, abs=1e-6)


def test_uncoupled_chain_has_no_correlations():
    k = build_kernel(ChainSpec(32, 0.0))
    rec = measure_pair(k, BlockPair(4, 8))
    assert rec.entropy_a == rec.entropy_b == rec.entropy_ab == 0.0
    assert rec.mutual_information == 0.0 and rec.log_negativity == 0.0
    assert mutual_information(k, BlockPair(3, 1)) == 0.0


def test_whole_chain_pair():
    rec = measure_pair(K64, BlockPair(32, 0))
    assert rec.entropy_ab == pytest.approx(0.0, abs=1e-6)
    assert rec.mutual_information == pytest.approx(2 * rec.entropy_a, abs=1e-6)


def test_compositional_equality():
    k = build_kernel(ChainSpec(16, 0.5))
    pair = BlockPair(2, 2)
    rec = measure_pair(k, pair)
    s_a = block_entropy(k, pair.sites_a(16))
    s_b = block_entropy(k, pair.sites_b(16))
    joint = union_state(k, pair)
    s_ab = entropy(symplectic_spectrum(joint))
    e = log_negativity(symplectic_spectrum(partial_transpose(joint, pair.sites_b(16))))
    assert rec.entropy_a == pytest.approx(s_a, abs=1e-14)
    assert rec.entropy_b == pytest.approx(s_b, abs=1e-14)
    assert rec.entropy_ab == pytest.approx(s_ab, abs=1e-13)
    assert rec.log_negativity == pytest.approx(e, abs=1e-13)
    assert rec.mutual_information == pytest.approx(mutual_information(k, pair), abs=1e-13)
    assert negativity(k, pair) == rec.log_negativity


pairs = st.tuples(st.integers(1, 12), st.integers(0, 20), st.integers(0, 63))


@settings(max_examples=40, deadline=None)
@given(pairs)
def test_record_invariants_and_translation(p):
    L, D, off = p
    base = measure_pair(K64, BlockPair(L, D))
    moved = measure_pair(K64, BlockPair(L, D, offset_a=off))
    assert base.mutual_information == base.entropy_a + base.entropy_b - base.entropy_ab
    assert base.mutual_information >= -1e-9
    assert base.log_negativity >= 0.0
    for a, b in zip(
        (base.entropy_a, base.entropy_ab, base.mutual_information, base.log_negativity),
        (moved.entropy_a, moved.entropy_ab, moved.mutual_information, moved.log_negativity),
    ):
        assert a == pytest.approx(b, abs=1e-9)


def test_negativity_nonincreasing_in_separation():
    # separations up to half the free arc, so B never nears A the other way round
    k = build_kernel(ChainSpec(256, 1 - 1e-6))
    values = [negativity(k, BlockPair(16, d)) for d in range(0, 113, 4)]
    assert np.all(np.diff(values) <= 1e-9)


def test_negativity_zero_iff_no_small_eigenvalue():
    k = build_kernel(ChainSpec(64, 0.5))
    for d in range(0, 20):
        joint = union_state(k, BlockPair(2, d))
        spec = symplectic_spectrum(partial_transpose(joint, joint.sites[2:]))
        e = log_negativity(spec)
        if spec.values.min() < 0.5:
            assert e > 0
        else:
            assert e == pytest.approx(0.0, abs=1e-12)


def test_entropy_grows_like_one_third_log():
    # entropy gain per doubling of L at criticality, relative to ln(2)/3
    k = build_kernel(ChainSpec.critical())
    s = [block_entropy(k, range(L)) for L in (32, 64, 128, 256)]
    ratios = np.diff(s) / (math.log(2) / 3)
    np.testing.assert_allclose(ratios, 1.0, rtol=0.10)


def test_negativity_drop_between_r_half_and_one():
    # ln E(r=1) - ln E(r=0.5) against -2*sqrt(2)*0.5 at the critical preset
    k = build_kernel(ChainSpec.critical())
    diff = math.log(negativity(k, BlockPair(512, 512)) / negativity(k, BlockPair(512, 256)))
    assert diff == pytest.approx(-math.sqrt(2), rel=0.05)
