"""Slow reference implementations used to validate the fast paths.

Nothing here is used by the measurement pipeline; size guards keep the
oracles out of production-scale calls. ``self_check`` runs the full
small-instance comparison grid and is exposed through the CLI.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .chain import ChainSpec, CorrelationKernel, build_kernel
from .errors import GeometryError, InvalidStateError, ResourceLimitError
from .gaussian import BlockPair, ReducedGaussianState, partial_transpose, union_state
from .measures import log_negativity
from .spectral import SpectrumSource, SymplecticSpectrum, symplectic_spectrum

KERNEL_GUARD = 4096
SPECTRUM_GUARD = 256

SELF_CHECK_SIZES = (8, 16, 64, 256)
SELF_CHECK_COUPLINGS = (0.0, 0.5, 0.9, 1.0 - 1e-6)
SELF_CHECK_MAX_BLOCK = 8


@dataclass
class OracleReport:
    name: str
    max_abs_diff: float = 0.0
    max_rel_diff: float = 0.0
    location: tuple = ()
    n_compared: int = 0
    tolerance: float = 0.0
    relative: bool = False

    def update(self, fast, slow, location) -> None:
        fast = np.atleast_1d(np.asarray(fast, dtype=float))
        slow = np.atleast_1d(np.asarray(slow, dtype=float))
        diff = np.abs(fast - slow)
        rel = diff / np.maximum(np.abs(slow), np.finfo(float).tiny)
        self.n_compared += diff.size
        if diff.size == 0:
            return
        if (rel if self.relative else diff).max() > self.worst:
            self.location = location
        self.max_abs_diff = max(self.max_abs_diff, float(diff.max()))
        self.max_rel_diff = max(self.max_rel_diff, float(rel.max()))

    @property
    def worst(self) -> float:
        return self.max_rel_diff if self.relative else self.max_abs_diff

    @property
    def passed(self) -> bool:
        return self.worst <= self.tolerance

    def summary(self) -> str:
        kind = "rel" if self.relative else "abs"
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] {self.name}: max {kind} diff {self.worst:.3e} "
            f"(tol {self.tolerance:.0e}) over {self.n_compared} values, worst at {self.location}"
        )


def kernel_direct_sum(spec: ChainSpec) -> CorrelationKernel:
    """Literal mode sums for ``g`` and ``h`` with no transform, O(N^2)."""
    n = spec.n_sites
    if n > KERNEL_GUARD:
        raise ResourceLimitError(f"direct-sum oracle limited to N <= {KERNEL_GUARD}")
    g = np.zeros(n)
    h = np.zeros(n)
    for k in range(n):
        theta = 2.0 * math.pi * k / n
        nu = math.sqrt(1.0 - spec.coupling * math.cos(theta))
        # k*x reduced mod n and folded onto [0, n/2]: small arguments, and
        # lags x and n - x hit the same cosine bit for bit
        m = (k * np.arange(n)) % n
        phase = np.cos(2.0 * np.pi * np.minimum(m, n - m) / n)
        g += phase / (2.0 * nu)
        h += phase * (nu / 2.0)
    return CorrelationKernel(spec, g / n, h / n)


def spectrum_via_generalized_eig(state: ReducedGaussianState) -> SymplecticSpectrum:
    """Symplectic spectrum from ``H v = mu^2 G^{-1} v`` (nonsymmetric QZ solve)."""
    m = state.size
    if m > SPECTRUM_GUARD:
        raise ResourceLimitError(f"generalized-eig oracle limited to M <= {SPECTRUM_GUARD}")
    g = np.asarray(state.g_block)
    try:
        g_inv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise InvalidStateError(f"singular position block: {exc}") from exc
    mu2 = sla.eig(np.asarray(state.h_block), g_inv, right=False)
    values = np.sort(np.sqrt(np.abs(mu2.real)))
    source = (
        SpectrumSource.PARTIAL_TRANSPOSE if state.is_transposed else SpectrumSource.PLAIN
    )
    return SymplecticSpectrum(values, source)


def negativity_two_modes_closed_form(state: ReducedGaussianState) -> float:
    """Logarithmic negativity of a two-site state transposed on its second site.

    The squared symplectic eigenvalues are the roots of
    ``t^2 - tr(G H~) t + det(G H~) = 0``.
    """
    if state.size != 2:
        raise GeometryError(f"closed form needs exactly two sites, got {state.size}")
    if state.transpose_mask is None:
        state = partial_transpose(state, [state.sites[1]])
    g = np.asarray(state.g_block)
    h = np.asarray(state.h_block)
    (a, b), (c, d) = g @ h
    tr, det = a + d, a * d - b * c
    disc = math.sqrt(max(tr * tr - 4.0 * det, 0.0))
    total = 0.0
    for t in ((tr - disc) / 2.0, (tr + disc) / 2.0):
        lam = math.sqrt(max(t, 0.0))
        total -= math.log2(min(2.0 * lam, 1.0))
    return total


def _pairs(n: int, max_block: int):
    for block_len in range(1, max_block + 1):
        for separation in range(0, n - 2 * block_len + 1):
            yield BlockPair(block_len, separation)


def self_check(
    sizes=SELF_CHECK_SIZES,
    couplings=SELF_CHECK_COUPLINGS,
    max_block: int = SELF_CHECK_MAX_BLOCK,
    kernel_sizes=None,
) -> list[OracleReport]:
    """Compare every fast path against its oracle on the small-instance grid."""
    kernel_rep = OracleReport("kernel fast vs direct sum", tolerance=1e-10)
    spec_rep = OracleReport(
        "spectrum Cholesky vs generalized eig", tolerance=1e-8, relative=True
    )
    two_rep = OracleReport("two-mode negativity closed form", tolerance=1e-10)

    for n, alpha in itertools.product(kernel_sizes or sizes, couplings):
        spec = ChainSpec(n, alpha)
        fast, slow = build_kernel(spec), kernel_direct_sum(spec)
        kernel_rep.update(np.r_[fast.g, fast.h], np.r_[slow.g, slow.h], (n, alpha))

    for n, alpha in itertools.product(sizes, couplings):
        kernel = build_kernel(ChainSpec(n, alpha))
        for pair in _pairs(n, max_block):
            joint = union_state(kernel, pair)
            pt = partial_transpose(joint, joint.sites[pair.block_len:])
            loc = (n, alpha, pair.block_len, pair.separation)
            for st in (joint, pt):
                spec_rep.update(
                    symplectic_spectrum(st).values,
                    spectrum_via_generalized_eig(st).values,
                    loc,
                )
            if pair.block_len == 1:
                two_rep.update(
                    log_negativity(symplectic_spectrum(pt)),
                    negativity_two_modes_closed_form(pt),
                    loc,
                )
    return [kernel_rep, spec_rep, two_rep]
