"""Entanglement negativity and mutual information between blocks of a
periodic harmonic chain, computed from Gaussian-state correlation matrices."""

from .chain import ChainSpec, CorrelationKernel, build_kernel, xi
from .errors import ChainentError
from .gaussian import BlockPair, extract_block, partial_transpose, union_state
from .measures import MeasureRecord, measure_pair, mutual_information, negativity
from .spectral import symplectic_spectrum

__version__ = "0.1.0"

__all__ = [
    "BlockPair", "ChainSpec", "ChainentError", "CorrelationKernel", "MeasureRecord",
    "build_kernel", "extract_block", "measure_pair", "mutual_information", "negativity",
    "partial_transpose", "symplectic_spectrum", "union_state", "xi",
]
