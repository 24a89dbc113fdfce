"""Entropies, mutual information and logarithmic negativity.

Units: entropies and mutual information in nats, logarithmic negativity
(and the order-1/2 Renyi entropy) in bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .chain import ChainSpec, CorrelationKernel
from .errors import InvalidStateError, SpectrumSourceError
from .gaussian import BlockPair, extract_block, union_state
from .spectral import (
    SpectrumSource,
    SymplecticSpectrum,
    cholesky_factor,
    spectrum_from_factor,
    symplectic_spectrum,
)

#: window below 1/2 that is treated as round-off in ``lambda - 1/2``
PURITY_CLAMP = 1e-9


def _require(spectrum: SymplecticSpectrum, source: SpectrumSource, what: str) -> None:
    if spectrum.source is not source:
        raise SpectrumSourceError(
            f"{what} needs a {source.value} spectrum, got {spectrum.source.value}"
        )


def _excess(spectrum: SymplecticSpectrum) -> np.ndarray:
    """``lambda - 1/2`` with round-off below zero clamped."""
    excess = np.asarray(spectrum.values) - 0.5
    if excess.size and excess.min() < -PURITY_CLAMP:
        raise InvalidStateError(
            f"symplectic eigenvalue {excess.min() + 0.5!r} violates the uncertainty bound"
        )
    return np.maximum(excess, 0.0)


def entropy(spectrum: SymplecticSpectrum) -> float:
    """Von Neumann entropy in nats.

    ``sum_j (l+1/2) ln(l+1/2) - (l-1/2) ln(l-1/2)`` over the symplectic
    eigenvalues ``l``.
    """
    _require(spectrum, SpectrumSource.PLAIN, "entropy")
    excess = _excess(spectrum)
    plus = excess + 1.0
    return float(max(np.sum(xlogy(plus, plus) - xlogy(excess, excess)), 0.0))


def log_negativity(spectrum: SymplecticSpectrum) -> float:
    """``-sum_j log2(min(2 l_j, 1))`` over a partially transposed spectrum."""
    _require(spectrum, SpectrumSource.PARTIAL_TRANSPOSE, "log_negativity")
    two_lam = np.minimum(2.0 * np.asarray(spectrum.values), 1.0)
    # + 0.0 turns a -0.0 sum into 0.0
    return float(-np.sum(np.log2(two_lam))) + 0.0


def renyi_half_entropy(spectrum: SymplecticSpectrum) -> float:
    """Renyi entropy of order 1/2 in bits.

    For a pure global state this equals the logarithmic negativity across
    the same cut, which makes it a cross-check of :func:`log_negativity`.
    """
    _require(spectrum, SpectrumSource.PLAIN, "renyi_half_entropy")
    excess = _excess(spectrum)
    return float(2.0 * np.sum(np.log2(np.sqrt(excess + 1.0) + np.sqrt(excess))))


def block_entropy(kernel: CorrelationKernel, sites) -> float:
    return entropy(symplectic_spectrum(extract_block(kernel, sites)))


def mutual_information(kernel: CorrelationKernel, pair: BlockPair) -> float:
    """``S(A) + S(B) - S(AB)`` in nats."""
    n = kernel.n_sites
    s_a = block_entropy(kernel, pair.sites_a(n))
    s_b = block_entropy(kernel, pair.sites_b(n))
    s_ab = entropy(symplectic_spectrum(union_state(kernel, pair)))
    return s_a + s_b - s_ab


@dataclass(frozen=True)
class MeasureRecord:
    entropy_a: float
    entropy_b: float
    entropy_ab: float
    mutual_information: float
    log_negativity: float
    spec: ChainSpec
    pair: BlockPair

    def as_dict(self) -> dict:
        d, l = self.pair.dimensionless(self.spec)
        return {
            "n_sites": self.spec.n_sites,
            "coupling": self.spec.coupling,
            "xi": self.spec.xi,
            "L": self.pair.block_len,
            "D": self.pair.separation,
            "offset": self.pair.offset_a,
            "r": self.pair.r,
            "d": d,
            "l": l,
            "S_A_nats": self.entropy_a,
            "S_B_nats": self.entropy_b,
            "S_AB_nats": self.entropy_ab,
            "I_nats": self.mutual_information,
            "E_LN_bits": self.log_negativity,
        }


def measure_pair(kernel: CorrelationKernel, pair: BlockPair) -> MeasureRecord:
    """All measures for one block pair.

    The Cholesky factor of ``G_{AB}`` is shared between the plain and the
    partially transposed union spectra.
    """
    n = kernel.n_sites
    s_a = block_entropy(kernel, pair.sites_a(n))
    s_b = block_entropy(kernel, pair.sites_b(n))
    joint = union_state(kernel, pair)
    factor = cholesky_factor(np.asarray(joint.g_block))
    s_ab = entropy(spectrum_from_factor(factor, joint.h_block, SpectrumSource.PLAIN))
    signs = np.r_[np.ones(pair.block_len), -np.ones(pair.block_len)]
    h_pt = joint.h_block * np.outer(signs, signs)
    e_ln = log_negativity(
        spectrum_from_factor(factor, h_pt, SpectrumSource.PARTIAL_TRANSPOSE)
    )
    return MeasureRecord(s_a, s_b, s_ab, s_a + s_b - s_ab, e_ln, kernel.spec, pair)


def negativity(kernel: CorrelationKernel, pair: BlockPair) -> float:
    """Logarithmic negativity alone (bits), skipping the entropies."""
    joint = union_state(kernel, pair)
    signs = np.r_[np.ones(pair.block_len), -np.ones(pair.block_len)]
    factor = cholesky_factor(np.asarray(joint.g_block))
    h_pt = joint.h_block * np.outer(signs, signs)
    return log_negativity(
        spectrum_from_factor(factor, h_pt, SpectrumSource.PARTIAL_TRANSPOSE)
    )
