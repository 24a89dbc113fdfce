"""Periodic harmonic chain and its vacuum two-point correlators.

The chain Hamiltonian (dimensionless, ring of ``N`` sites, ``q_{N+1} = q_1``)::

    H = 1/2 * sum_n (q_n^2 + p_n^2 - alpha * q_n q_{n+1})

is diagonalized by plane waves with frequencies
``nu_k = sqrt(1 - alpha cos(2 pi k / N))``. In the ground state

    g(x) = <q_i q_{i+x}> = 1/(2N) sum_k cos(theta_k x) / nu_k
    h(x) = <p_i p_{i+x}> = 1/(2N) sum_k nu_k cos(theta_k x)

Both are circulant, so they are stored by lag only. ``<q p>`` cross
correlations vanish identically in this vacuum and are not represented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, TextIO

import numpy as np

from .errors import DomainError, FitError, ResourceLimitError

#: Largest chain built by :func:`build_kernel` unless overridden.
MAX_SITES = 1 << 24

CRITICAL_COUPLING = 1.0 - 1e-12
FULL_N_SITES = 20_000
DESK_N_SITES = 8192


def xi(coupling: float) -> float:
    """Correlation length in lattice units, ``sqrt(1 / (2 (1 - coupling)))``."""
    if not (0.0 <= coupling < 1.0) or math.isnan(coupling):
        raise DomainError(f"coupling must satisfy 0 <= coupling < 1, got {coupling!r}")
    return math.sqrt(1.0 / (2.0 * (1.0 - coupling)))


def coupling_from_xi(correlation_length: float) -> float:
    """Inverse of :func:`xi`."""
    if not correlation_length >= math.sqrt(0.5):
        raise DomainError(
            f"correlation length must be >= 1/sqrt(2), got {correlation_length!r}"
        )
    return max(0.0, 1.0 - 1.0 / (2.0 * correlation_length**2))


@dataclass(frozen=True)
class ChainSpec:
    """A ring of ``n_sites`` oscillators with nearest-neighbour coupling.

    ``mass`` follows the continuum mapping ``m = N / xi`` used when the
    lattice is refined at fixed physical length.
    """

    n_sites: int
    coupling: float

    def __post_init__(self):
        if isinstance(self.n_sites, bool) or int(self.n_sites) != self.n_sites:
            raise DomainError(f"n_sites must be an integer, got {self.n_sites!r}")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        if self.n_sites < 2:
            raise DomainError(f"n_sites must be >= 2, got {self.n_sites}")
        object.__setattr__(self, "coupling", float(self.coupling))
        xi(self.coupling)  # validates

    @classmethod
    def from_xi(cls, n_sites: int, correlation_length: float) -> ChainSpec:
        return cls(n_sites, coupling_from_xi(correlation_length))

    @classmethod
    def critical(cls, n_sites: int = FULL_N_SITES) -> ChainSpec:
        """Near-critical preset, ``alpha = 1 - 1e-12``."""
        return cls(n_sites, CRITICAL_COUPLING)

    @property
    def xi(self) -> float:
        return xi(self.coupling)

    @property
    def mass(self) -> float:
        return self.n_sites / self.xi

    def thetas(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_sites) / self.n_sites

    def frequencies(self) -> np.ndarray:
        """All normal-mode frequencies ``nu_k``, ``k = 0..N-1``."""
        return np.sqrt(1.0 - self.coupling * np.cos(self.thetas()))


def dispersion(k: int, spec: ChainSpec) -> float:
    """Frequency of mode ``k``."""
    if not 0 <= k < spec.n_sites:
        raise DomainError(f"mode index {k} outside [0, {spec.n_sites})")
    theta = 2.0 * math.pi * k / spec.n_sites
    return math.sqrt(1.0 - spec.coupling * math.cos(theta))


@dataclass(frozen=True)
class CorrelationKernel:
    """Lag-indexed vacuum correlators of one chain.

    ``g[x]`` and ``h[x]`` hold the position and momentum correlators at lag
    ``x`` for ``x = 0..N-1``; ``g[x] == g[N - x]``.
    """

    spec: ChainSpec
    g: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.spec.n_sites
        for name in ("g", "h"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have shape ({n},), got {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_sites(self) -> int:
        return self.spec.n_sites

    def ring_lag(self, i, j):
        """Ring distance ``min(|i-j|, N-|i-j|)``; works elementwise on arrays."""
        d = np.abs(np.asarray(i) - np.asarray(j))
        return np.minimum(d, self.n_sites - d)

    def export(self, stream: TextIO, which: Literal["g", "h"] = "g") -> None:
        """Write ``lag value`` lines for one correlator."""
        values = self.g if which == "g" else self.h
        for lag, v in enumerate(values):
            stream.write(f"{lag} {v:.17g}\n")


def _symmetrize(values: np.ndarray) -> np.ndarray:
    # float addition commutes, so the result satisfies v[x] == v[N-x] exactly
    mirrored = np.roll(values[::-1], 1)
    return 0.5 * (values + mirrored)


def build_kernel(spec: ChainSpec, max_sites: int | None = None) -> CorrelationKernel:
    """Vacuum correlators via one FFT per correlator, O(N log N).

    The zero mode is kept as is; its frequency ``sqrt(1 - alpha)`` is finite
    for every admissible coupling.
    """
    limit = MAX_SITES if max_sites is None else max_sites
    if spec.n_sites > limit:
        raise ResourceLimitError(f"n_sites={spec.n_sites} exceeds limit {limit}")
    nu = spec.frequencies()
    # ifft carries the 1/N; the spectral weights are even in k so the result is real
    g = np.fft.ifft(0.5 / nu).real
    h = np.fft.ifft(0.5 * nu).real
    return CorrelationKernel(spec, _symmetrize(g), _symmetrize(h))


def asymptotic_correlators(
    x: float,
    mode: Literal["critical", "noncritical"] = "critical",
    decay_length: float | None = None,
) -> tuple[float, float]:
    """Large-distance shapes of ``(g, h)``, up to additive/multiplicative constants.

    Critical: ``g ~ -log x``, ``h ~ -1/x^2``.
    Noncritical: ``g ~ exp(-x/decay_length) / sqrt(x)`` and
    ``h ~ -exp(-x/decay_length) / x^(3/2)``. The decay length is an explicit
    argument; :func:`kernel_decay_length` measures it on an exact kernel.
    Signs follow the exact lattice kernel (``g > 0``, ``h < 0`` off-site).
    """
    if not x > 0:
        raise DomainError(f"distance must be positive, got {x!r}")
    if mode == "critical":
        return -math.log(x), -1.0 / x**2
    if mode == "noncritical":
        if decay_length is None or not decay_length > 0:
            raise DomainError("noncritical mode needs a positive decay_length")
        damp = math.exp(-x / decay_length)
        return damp / math.sqrt(x), -damp / x**1.5
    raise DomainError(f"unknown mode {mode!r}")


def kernel_decay_length(
    kernel: CorrelationKernel, window: tuple[int, int] | None = None
) -> float:
    """Fit the exponential decay length of ``g`` on a tail window.

    Regresses ``log(g(x) sqrt(x))`` on ``x``; the default window is
    ``[2 xi, 6 xi]`` clipped to half the ring.
    """
    n = kernel.n_sites
    corr = kernel.spec.xi
    lo, hi = window if window is not None else (int(2 * corr), int(6 * corr))
    lo, hi = max(lo, 1), min(hi, n // 2)
    x = np.arange(lo, hi + 1)
    y = kernel.g[x]
    if x.size < 3 or np.any(y <= 0):
        raise FitError(f"cannot fit decay on lags [{lo}, {hi}]")
    slope = np.polyfit(x, np.log(y * np.sqrt(x)), 1)[0]
    if slope >= 0:
        raise FitError("kernel tail does not decay on the chosen window")
    return -1.0 / slope
