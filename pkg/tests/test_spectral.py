import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainent.chain import ChainSpec, build_kernel
from chainent.errors import InvalidStateError
from chainent.gaussian import ReducedGaussianState, extract_block, partial_transpose
from chainent.spectral import SpectrumSource, symplectic_spectrum

COUPLINGS = [0.0, 0.5, 0.9, 1 - 1e-6]

# 2-site block {0,1} of N=8, alpha=0.5: roots of the 2x2 trace/determinant
# formula evaluated at 30 digits (mpmath), frozen
SPEC2 = [0.50343539574828149522, 0.50591769769781101626]


def test_single_uncoupled_site():
    s = symplectic_spectrum(extract_block(build_kernel(ChainSpec(4, 0.0)), [2]))
    assert list(s.values) == [0.5]
    assert s.source is SpectrumSource.PLAIN


@pytest.mark.parametrize("n", [8, 64, 256, 512])
@pytest.mark.parametrize("a", COUPLINGS)
def test_full_chain_is_pure(n, a):
    s = symplectic_spectrum(extract_block(build_kernel(ChainSpec(n, a)), range(n)))
    np.testing.assert_allclose(s.values, 0.5, atol=1e-6)


def test_two_site_block_against_closed_form():
    s = symplectic_spectrum(extract_block(build_kernel(ChainSpec(8, 0.5)), [0, 1]))
    np.testing.assert_allclose(s.values, SPEC2, rtol=1e-13)


@pytest.mark.parametrize("a", [0.5, 0.9, 1 - 1e-6])
def test_determinant_identity(a):
    st_ = extract_block(build_kernel(ChainSpec(128, a)), range(10, 30))
    lam = symplectic_spectrum(st_).values
    _, ld_g = np.linalg.slogdet(st_.g_block)
    _, ld_h = np.linalg.slogdet(st_.h_block)
    assert np.exp(ld_g + ld_h - 2 * np.sum(np.log(lam))) == pytest.approx(1.0, rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 99), min_size=2, max_size=12, unique=True), st.randoms())
def test_permutation_invariance(sites, rnd):
    k = build_kernel(ChainSpec(100, 0.9))
    shuffled = list(sites)
    rnd.shuffle(shuffled)
    a = symplectic_spectrum(extract_block(k, sites)).values
    b = symplectic_spectrum(extract_block(k, shuffled)).values
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_trivial_mask_keeps_spectrum():
    k = build_kernel(ChainSpec(64, 0.9))
    st_ = extract_block(k, range(12))
    plain = symplectic_spectrum(st_).values
    flipped = partial_transpose(st_, list(st_.sites))
    assert np.all(flipped.transpose_mask == -1)
    np.testing.assert_array_equal(symplectic_spectrum(flipped).values, plain)


def test_partial_transpose_source_and_sorting():
    k = build_kernel(ChainSpec(64, 0.9))
    st_ = extract_block(k, range(8))
    s = symplectic_spectrum(partial_transpose(st_, [4, 5, 6, 7]))
    assert s.source is SpectrumSource.PARTIAL_TRANSPOSE
    assert np.all(np.diff(s.values) >= 0) and s.values[0] < 0.5


def test_not_positive_definite():
    g = np.array([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(InvalidStateError):
        symplectic_spectrum(ReducedGaussianState(np.array([0, 1]), g, np.eye(2)))


def test_inputs_not_mutated():
    st_ = extract_block(build_kernel(ChainSpec(32, 0.5)), range(6))
    g, h = np.array(st_.g_block), np.array(st_.h_block)
    symplectic_spectrum(st_)
    assert np.array_equal(g, st_.g_block) and np.array_equal(h, st_.h_block)
