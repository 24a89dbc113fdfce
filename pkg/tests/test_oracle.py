import math

import numpy as np
import pytest

from chainent.chain import ChainSpec, build_kernel
from chainent.errors import GeometryError, ResourceLimitError
from chainent.gaussian import BlockPair, ReducedGaussianState, extract_block, union_state
from chainent.measures import negativity
from chainent.oracle import (
    OracleReport,
    kernel_direct_sum,
    negativity_two_modes_closed_form,
    self_check,
    spectrum_via_generalized_eig,
)
from chainent.spectral import symplectic_spectrum

# -log2(2 lambda_min) for sites {0, 2} of N=8, alpha=0.9, at 30 digits (mpmath)
TWO_MODE_D1 = 0.0053576566495209808745


def test_direct_sum_uncoupled_and_symmetric():
    k = kernel_direct_sum(ChainSpec(16, 0.0))
    assert k.g[0] == pytest.approx(0.5) and np.allclose(k.g[1:], 0, atol=1e-15)
    k = kernel_direct_sum(ChainSpec(64, 0.9))
    x = np.arange(1, 64)
    np.testing.assert_array_equal(k.g[x], k.g[64 - x])


def test_direct_sum_matches_fast_path():
    spec = ChainSpec(64, 0.9)
    fast, slow = build_kernel(spec), kernel_direct_sum(spec)
    assert np.max(np.abs(fast.g - slow.g)) <= 1e-10
    assert np.max(np.abs(fast.h - slow.h)) <= 1e-10


def test_guards():
    with pytest.raises(ResourceLimitError):
        kernel_direct_sum(ChainSpec(5000, 0.5))
    big = extract_block(build_kernel(ChainSpec(600, 0.5)), range(257))
    with pytest.raises(ResourceLimitError):
        spectrum_via_generalized_eig(big)
    with pytest.raises(GeometryError):
        negativity_two_modes_closed_form(extract_block(build_kernel(ChainSpec(8, 0.5)), [0, 1, 2]))


def test_scalar_state():
    s = ReducedGaussianState(np.array([0]), np.array([[0.7]]), np.array([[0.9]]))
    assert spectrum_via_generalized_eig(s).values[0] == pytest.approx(math.sqrt(0.63), rel=1e-14)


def test_random_spd_pair_agrees():
    rng = np.random.default_rng(12345)
    m = 40
    a = rng.normal(size=(m, m))
    b = rng.normal(size=(m, m))
    g = (a + a.T) / 2 + m * np.eye(m)
    h = (b + b.T) / 2 + m * np.eye(m)
    s = ReducedGaussianState(np.arange(m), g, h)
    np.testing.assert_allclose(
        symplectic_spectrum(s).values, spectrum_via_generalized_eig(s).values, rtol=1e-8
    )


def test_two_mode_closed_form():
    k0 = build_kernel(ChainSpec(16, 0.0))
    assert negativity_two_modes_closed_form(union_state(k0, BlockPair(1, 0))) == 0.0
    k = build_kernel(ChainSpec(8, 0.9))
    near = negativity_two_modes_closed_form(union_state(k, BlockPair(1, 1)))
    far = negativity_two_modes_closed_form(union_state(k, BlockPair(1, 4)))
    assert near == pytest.approx(TWO_MODE_D1, rel=1e-10)
    assert near == pytest.approx(negativity(k, BlockPair(1, 1)), abs=1e-10)
    assert far == pytest.approx(negativity(k, BlockPair(1, 4)), abs=1e-10)
    assert far <= near


def test_report_bookkeeping():
    rep = OracleReport("demo", tolerance=1e-3)
    rep.update(np.array([1.0, 2.0]), np.array([1.0, 2.01]), "x")
    rep.update(np.array([1.0]), np.array([1.0005]), "y")
    assert rep.n_compared == 3 and rep.location == "x" and not rep.passed
    assert rep.summary().startswith("[FAIL] demo")


def test_self_check_small_grid():
    reports = self_check(sizes=(8, 16), couplings=(0.0, 0.9), max_block=3)
    assert len(reports) == 3 and all(r.passed for r in reports)
