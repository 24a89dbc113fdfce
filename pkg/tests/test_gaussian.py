import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainent.chain import ChainSpec, build_kernel
from chainent.errors import GeometryError
from chainent.gaussian import BlockPair, extract_block, partial_transpose, union_state
from chainent.oracle import kernel_direct_sum

KERNEL = build_kernel(ChainSpec(64, 0.9))


def test_block_pair_geometry():
    p = BlockPair(4, 6, offset_a=3)
    assert p.offset_b == 13 and p.r == 1.5 and p.footprint == 14
    assert list(p.sites_b(16)) == [13, 14, 15, 0]
    with pytest.raises(GeometryError, match="L=4, D=9"):
        BlockPair(4, 9).check(16)
    with pytest.raises(GeometryError):
        BlockPair(0, 1)
    with pytest.raises(GeometryError):
        BlockPair(1, -1)
    d, l = BlockPair(40, 20).dimensionless(ChainSpec.from_xi(1000, 20.0))
    assert d == pytest.approx(1.0) and l == pytest.approx(2.0)


def test_uncoupled_blocks_are_half_identity():
    k = build_kernel(ChainSpec(16, 0.0))
    s = extract_block(k, [0, 3, 7, 11])
    np.testing.assert_allclose(s.g_block, 0.5 * np.eye(4), atol=1e-12)
    np.testing.assert_allclose(s.h_block, 0.5 * np.eye(4), atol=1e-12)
    assert s.transpose_mask is None


def test_single_site():
    s = extract_block(KERNEL, [5])
    assert s.g_block.shape == (1, 1)
    assert s.g_block[0, 0] == KERNEL.g[0] and s.h_block[0, 0] == KERNEL.h[0]


def test_two_sites_against_direct_sum():
    oracle = kernel_direct_sum(ChainSpec(8, 0.5))
    s = extract_block(build_kernel(ChainSpec(8, 0.5)), [0, 1])
    want_g = [[oracle.g[0], oracle.g[1]], [oracle.g[1], oracle.g[0]]]
    want_h = [[oracle.h[0], oracle.h[1]], [oracle.h[1], oracle.h[0]]]
    np.testing.assert_allclose(s.g_block, want_g, atol=1e-12)
    np.testing.assert_allclose(s.h_block, want_h, atol=1e-12)


def test_union_matches_direct_sum_entrywise():
    spec = ChainSpec(16, 0.5)
    oracle = kernel_direct_sum(spec)
    s = union_state(build_kernel(spec), BlockPair(2, 3))
    assert list(s.sites) == [0, 1, 5, 6]
    for i, a in enumerate(s.sites):
        for j, b in enumerate(s.sites):
            lag = min(abs(a - b), 16 - abs(a - b))
            assert s.g_block[i, j] == pytest.approx(oracle.g[lag], abs=1e-12)
            assert s.h_block[i, j] == pytest.approx(oracle.h[lag], abs=1e-12)


def test_adjacent_union_equals_extract():
    u = union_state(KERNEL, BlockPair(1, 0, offset_a=9))
    e = extract_block(KERNEL, [9, 10])
    assert np.array_equal(u.g_block, e.g_block) and np.array_equal(u.h_block, e.h_block)


def test_antipodal_lag():
    # L=1 blocks at distance N/2: offset_b = 1 + D = 32
    s = union_state(KERNEL, BlockPair(1, 31))
    assert s.g_block[0, 1] == KERNEL.g[32]


@pytest.mark.parametrize("sites", [[], [0, 0], [64], [-1]])
def test_extract_rejects_bad_sites(sites):
    with pytest.raises(GeometryError):
        extract_block(KERNEL, sites)


def test_partial_transpose_examples():
    s = union_state(KERNEL, BlockPair(2, 1))
    same = partial_transpose(s, [])
    assert np.array_equal(same.h_block, s.h_block)
    everything = partial_transpose(s, list(s.sites))
    assert np.array_equal(everything.h_block, s.h_block)
    pt = partial_transpose(s, s.sites[2:])
    assert list(pt.transpose_mask) == [1, 1, -1, -1]
    np.testing.assert_array_equal(pt.h_block[:2, 2:], -s.h_block[:2, 2:])
    np.testing.assert_array_equal(pt.h_block[:2, :2], s.h_block[:2, :2])
    np.testing.assert_array_equal(pt.h_block[2:, 2:], s.h_block[2:, 2:])
    assert pt.g_block is s.g_block
    with pytest.raises(GeometryError):
        partial_transpose(s, [40])


site_sets = st.lists(st.integers(0, 63), min_size=1, max_size=10, unique=True)


@settings(max_examples=50, deadline=None)
@given(sites=site_sets, data=st.data())
def test_partial_transpose_involution(sites, data):
    s = extract_block(KERNEL, sites)
    b = data.draw(st.lists(st.sampled_from(sites), unique=True))
    twice = partial_transpose(partial_transpose(s, b), b)
    assert np.array_equal(twice.h_block, s.h_block)
    assert twice.transpose_mask is None
    once = partial_transpose(s, b)
    assert np.array_equal(once.h_block, once.h_block.T)
    np.linalg.cholesky(once.h_block)


@settings(max_examples=50, deadline=None)
@given(sites=site_sets, data=st.data())
def test_permutation_consistency(sites, data):
    perm = data.draw(st.permutations(range(len(sites))))
    a = extract_block(KERNEL, sites)
    b = extract_block(KERNEL, [sites[i] for i in perm])
    idx = np.ix_(perm, perm)
    assert np.array_equal(np.asarray(a.g_block)[idx], b.g_block)
    assert np.array_equal(np.asarray(a.h_block)[idx], b.h_block)
