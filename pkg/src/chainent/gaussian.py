"""Reduced Gaussian states of site subsets and the partial transpose."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .chain import ChainSpec, CorrelationKernel
from .errors import GeometryError


@dataclass(frozen=True)
class BlockPair:
    """Two blocks of ``block_len`` sites separated by ``separation`` sites.

    Block A starts at ``offset_a``; block B starts ``block_len + separation``
    sites later (modulo the ring).
    """

    block_len: int
    separation: int
    offset_a: int = 0

    def __post_init__(self):
        if self.block_len < 1:
            raise GeometryError(f"block_len must be >= 1, got {self.block_len}")
        if self.separation < 0:
            raise GeometryError(f"separation must be >= 0, got {self.separation}")
        if self.offset_a < 0:
            raise GeometryError(f"offset_a must be >= 0, got {self.offset_a}")

    @property
    def offset_b(self) -> int:
        return self.offset_a + self.block_len + self.separation

    @property
    def r(self) -> float:
        return self.separation / self.block_len

    @property
    def footprint(self) -> int:
        """Sites spanned from the start of A to the end of B."""
        return 2 * self.block_len + self.separation

    def check(self, n_sites: int) -> None:
        if self.footprint > n_sites:
            raise GeometryError(
                f"blocks do not fit on the ring: 2L+D = {self.footprint} > N = {n_sites}"
                f" (L={self.block_len}, D={self.separation})"
            )

    def sites_a(self, n_sites: int) -> np.ndarray:
        self.check(n_sites)
        return (self.offset_a + np.arange(self.block_len)) % n_sites

    def sites_b(self, n_sites: int) -> np.ndarray:
        self.check(n_sites)
        return (self.offset_b + np.arange(self.block_len)) % n_sites

    def dimensionless(self, spec: ChainSpec) -> tuple[float, float]:
        """``(d, l)`` in units of the correlation length."""
        return self.separation / spec.xi, self.block_len / spec.xi


@dataclass(frozen=True)
class ReducedGaussianState:
    """Position/momentum correlation blocks on an ordered site list.

    ``transpose_mask`` holds the per-site sign ``s_i`` of a partial
    transpose (time reversal ``p -> s p``); ``None`` means no transpose.
    """

    sites: tuple[int, ...]
    g_block: np.ndarray = field(repr=False)
    h_block: np.ndarray = field(repr=False)
    transpose_mask: np.ndarray | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.sites)

    @property
    def is_transposed(self) -> bool:
        return self.transpose_mask is not None


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def extract_block(kernel: CorrelationKernel, sites: Iterable[int]) -> ReducedGaussianState:
    """Restrict the vacuum correlators to ``sites`` (order preserved)."""
    idx = np.asarray(list(sites), dtype=np.int64)
    if idx.ndim != 1 or idx.size == 0:
        raise GeometryError("site list must be a non-empty sequence")
    n = kernel.n_sites
    if np.any(idx < 0) or np.any(idx >= n):
        raise GeometryError(f"site index out of range [0, {n})")
    if np.unique(idx).size != idx.size:
        raise GeometryError("duplicate site index")
    lag = kernel.ring_lag(idx[:, None], idx[None, :])
    return ReducedGaussianState(
        tuple(int(i) for i in idx), _freeze(kernel.g[lag]), _freeze(kernel.h[lag])
    )


def union_state(kernel: CorrelationKernel, pair: BlockPair) -> ReducedGaussianState:
    """State on A then B."""
    n = kernel.n_sites
    return extract_block(kernel, np.concatenate([pair.sites_a(n), pair.sites_b(n)]))


def partial_transpose(
    state: ReducedGaussianState, b_sites: Sequence[int] | Iterable[int]
) -> ReducedGaussianState:
    """Flip the momentum sign on ``b_sites``.

    ``h_ij -> s_i s_j h_ij`` with ``s = -1`` on ``b_sites``. Masks compose,
    so applying the same transpose twice gives back the original state.
    """
    b = set(int(i) for i in b_sites)
    position = {site: k for k, site in enumerate(state.sites)}
    missing = b - position.keys()
    if missing:
        raise GeometryError(f"sites {sorted(missing)} are not part of the state")
    flip = np.ones(state.size)
    flip[[position[i] for i in b]] = -1.0
    h = state.h_block * np.outer(flip, flip)
    signs = flip if state.transpose_mask is None else flip * state.transpose_mask
    mask = None if np.all(signs > 0) else _freeze(signs)
    return ReducedGaussianState(state.sites, state.g_block, _freeze(h), mask)
