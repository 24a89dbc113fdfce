"""Symplectic spectra of reduced Gaussian states.

For a state without q-p correlations the symplectic eigenvalues are the
positive square roots of the eigenvalues of ``G H``. With ``G = C C^T``
(Cholesky), ``G H`` is similar to the symmetric positive definite matrix
``C^T H C``, which a symmetric dense eigensolver handles accurately.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.linalg.blas import dtrmm

from .errors import EigensolverError, InvalidStateError
from .gaussian import ReducedGaussianState

#: eigenvalues of ``C^T H C`` are clipped at this floor before the square root
EIGEN_FLOOR = 1e-30
#: anything more negative than this is a genuinely invalid state, not round-off
NEGATIVE_TOLERANCE = 1e-8


class SpectrumSource(enum.Enum):
    PLAIN = "plain"
    PARTIAL_TRANSPOSE = "partial_transpose"


@dataclass(frozen=True)
class SymplecticSpectrum:
    values: np.ndarray = field(repr=False)
    source: SpectrumSource = SpectrumSource.PLAIN

    def __len__(self) -> int:
        return len(self.values)


def cholesky_factor(g_block: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of ``g_block``; raises InvalidStateError if not PD."""
    try:
        return sla.cholesky(g_block, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise InvalidStateError(
            f"position correlation block is not positive definite: {exc}"
        ) from exc


def spectrum_from_factor(
    factor: np.ndarray, h_block: np.ndarray, source: SpectrumSource
) -> SymplecticSpectrum:
    """Spectrum of ``C^T H C`` for a precomputed Cholesky factor ``C``."""
    # two triangular products instead of general matmuls
    hc = dtrmm(1.0, factor, h_block, side=1, lower=1)
    sym = dtrmm(1.0, factor, hc, side=0, lower=1, trans_a=1)
    sym = 0.5 * (sym + sym.T)
    try:
        w = sla.eigvalsh(sym, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc
    if w[0] < -NEGATIVE_TOLERANCE:
        raise InvalidStateError(
            f"G H has a negative eigenvalue {w[0]:.3e}; state is not physical"
        )
    values = np.sqrt(np.maximum(w, EIGEN_FLOOR))
    values.sort()
    values.setflags(write=False)
    return SymplecticSpectrum(values, source)


def symplectic_spectrum(state: ReducedGaussianState) -> SymplecticSpectrum:
    """Sorted symplectic eigenvalues of ``state``.

    Raises:
        InvalidStateError: ``g_block`` is not positive definite, or the
            symmetrized product has an eigenvalue below ``-1e-8``.
        EigensolverError: the eigensolver did not converge.
    """
    source = (
        SpectrumSource.PARTIAL_TRANSPOSE if state.is_transposed else SpectrumSource.PLAIN
    )
    factor = cholesky_factor(np.asarray(state.g_block))
    return spectrum_from_factor(factor, np.asarray(state.h_block), source)
