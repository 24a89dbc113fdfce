"""Curve fits and feature extraction on sweep data.

All fitters except :func:`fit_overall_model` are linear least squares in
transformed coordinates (``log y`` against ``x``, ``log x`` or ``x^2``).
Rows are ``(x, y)`` pairs; a window ``(lo, hi)`` is inclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import FitError, NoPlateauError

#: negativities below this are at the double-precision floor of the
#: eigenvalue pipeline and are excluded from logarithmic fits
NEGATIVITY_FLOOR = 1e-10

BETA_C = 2.0 * math.sqrt(2.0)
SHORT_DISTANCE_POWER = 1.0 / 3.0

Window = tuple[float, float]


@dataclass
class FitResult:
    model: str
    coefficients: dict[str, float]
    residual_rms: float
    window: Window
    n_points: int
    converged: bool = True
    extra: dict = field(default_factory=dict)

    def __getitem__(self, key: str) -> float:
        return self.coefficients[key]

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "coefficients": dict(self.coefficients),
            "residual_rms": self.residual_rms,
            "window": list(self.window),
            "n_points": self.n_points,
            "converged": self.converged,
            **({"extra": self.extra} if self.extra else {}),
        }


def _prepare(rows, window: Window | None, positive_x=False, positive_y=True):
    data = np.asarray(list(rows) if not isinstance(rows, np.ndarray) else rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise FitError("rows must be a sequence of (x, y) pairs")
    x, y = data[:, 0], data[:, 1]
    if window is not None:
        lo, hi = window
        keep = (x >= lo) & (x <= hi)
        x, y = x[keep], y[keep]
    # duplicate x values are averaged
    ux, inverse = np.unique(x, return_inverse=True)
    if ux.size != x.size:
        y = np.bincount(inverse, weights=y) / np.bincount(inverse)
        x = ux
    else:
        order = np.argsort(x)
        x, y = x[order], y[order]
    if x.size < 3:
        raise FitError(f"need at least 3 points in window {window}, got {x.size}")
    if positive_y and np.any(y <= 0):
        raise FitError("all y values must be positive for a logarithmic fit")
    if positive_x and np.any(x <= 0):
        raise FitError("all x values must be positive for a power-law fit")
    win = (float(x[0]), float(x[-1])) if window is None else (float(window[0]), float(window[1]))
    return x, y, win


def _linear(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


def fit_linear(rows, window: Window | None = None) -> FitResult:
    """Plain ``y = slope x + intercept``."""
    x, y, win = _prepare(rows, window, positive_y=False)
    slope, intercept, rms = _linear(x, y)
    return FitResult("linear", {"slope": slope, "intercept": intercept}, rms, win, x.size)


def fit_exponential(rows, window: Window | None = None) -> FitResult:
    """``y = exp(intercept - rate x)``; ``rate > 0`` for decaying data."""
    x, y, win = _prepare(rows, window)
    slope, intercept, rms = _linear(x, np.log(y))
    return FitResult("exp_linear", {"rate": -slope, "intercept": intercept}, rms, win, x.size)


def fit_power(rows, window: Window | None = None) -> FitResult:
    """``y = exp(intercept) x^exponent``."""
    x, y, win = _prepare(rows, window, positive_x=True)
    slope, intercept, rms = _linear(np.log(x), np.log(y))
    return FitResult("power_law", {"exponent": slope, "intercept": intercept}, rms, win, x.size)


def fit_quadratic_exponent(rows, window: Window | None = None) -> FitResult:
    """``y = exp(intercept - beta x^2)``."""
    x, y, win = _prepare(rows, window)
    slope, intercept, rms = _linear(x**2, np.log(y))
    return FitResult(
        "exp_quadratic", {"beta": -slope, "intercept": intercept}, rms, win, x.size
    )


def residual_power(rows, beta: float, window: Window | None = None) -> FitResult:
    """Power-law fit of ``y exp(beta x)`` against ``x``.

    Removes a known exponential decay and exposes the prefactor's power law.
    """
    data = np.asarray(list(rows), dtype=float)
    scaled = np.column_stack([data[:, 0], data[:, 1] * np.exp(beta * data[:, 0])])
    fit = fit_power(scaled, window)
    fit.extra["beta"] = beta
    return fit


def loglog_slope(rows) -> list[tuple[float, float]]:
    """``d log E / d log L`` by centered differences, one-sided at the ends."""
    data = np.asarray(list(rows), dtype=float)
    if data.shape[0] < 3:
        raise FitError("need at least 3 points")
    if np.any(data <= 0):
        raise FitError("log-log slope needs positive x and y")
    order = np.argsort(data[:, 0])
    ln_x, ln_y = np.log(data[order, 0]), np.log(data[order, 1])
    if np.any(np.diff(ln_x) == 0):
        raise FitError("duplicate x values")
    slope = np.empty_like(ln_x)
    slope[1:-1] = (ln_y[2:] - ln_y[:-2]) / (ln_x[2:] - ln_x[:-2])
    slope[0] = (ln_y[1] - ln_y[0]) / (ln_x[1] - ln_x[0])
    slope[-1] = (ln_y[-1] - ln_y[-2]) / (ln_x[-1] - ln_x[-2])
    return list(zip(data[order, 0].tolist(), slope.tolist()))


def level_crossings(rows, level: float, log_x: bool = True) -> list[float]:
    """Abscissae where a piecewise-linear curve crosses ``level``.

    Interpolation is linear in ``log x`` when ``log_x`` is set.
    """
    data = np.asarray(list(rows), dtype=float)
    x, y = data[:, 0], data[:, 1] - level
    t = np.log(x) if log_x else x
    out = []
    for i in range(len(x) - 1):
        if y[i] == 0:
            out.append(float(x[i]))
        elif y[i] * y[i + 1] < 0:
            frac = y[i] / (y[i] - y[i + 1])
            ti = t[i] + frac * (t[i + 1] - t[i])
            out.append(float(math.exp(ti) if log_x else ti))
    if len(y) and y[-1] == 0:
        out.append(float(x[-1]))
    return out


def overall_model(r, amplitude, a, gamma, alpha=SHORT_DISTANCE_POWER, beta=BETA_C):
    """``amplitude (a r^-alpha + exp(-gamma / r)) exp(-beta r)``."""
    r = np.asarray(r, dtype=float)
    return amplitude * (a * r**-alpha + np.exp(-gamma / r)) * np.exp(-beta * r)


def fit_overall_model(
    rows,
    window: Window | None = (0.1, 2.5),
    alpha: float = SHORT_DISTANCE_POWER,
    beta: float = BETA_C,
    free_amplitude: bool = True,
    cofit: bool = False,
) -> FitResult:
    """Nonlinear fit of the critical-chain negativity curve in log space.

    ``(a, gamma)`` are always free; ``amplitude`` is free unless
    ``free_amplitude`` is False (then fixed to 1). With ``cofit`` the
    exponents ``alpha`` and ``beta`` are refined too, starting from the
    given values. Seeds come from the two asymptotic linear fits.
    """
    x, y, win = _prepare(rows, window, positive_x=True)
    ln_y = np.log(y)

    # seeds: small-r head ~ A a r^-alpha e^{-beta r}, large-r tail ~ A (a r^-alpha + 1) e^{-beta r}
    n_head = max(3, x.size // 4)
    head_level = float(np.mean(ln_y[:n_head] + beta * x[:n_head] + alpha * np.log(x[:n_head])))
    tail_level = float(np.mean(ln_y[-3:] + beta * x[-3:]))
    amp0 = 0.5 * math.exp(tail_level) if free_amplitude else 1.0
    a0 = math.exp(head_level) / amp0

    names = ["a", "gamma"] + (["amplitude"] if free_amplitude else []) + (
        ["alpha", "beta"] if cofit else []
    )
    p0 = [a0, 1.0] + ([amp0] if free_amplitude else []) + ([alpha, beta] if cofit else [])

    def unpack(p):
        vals = dict(zip(names, p))
        return (
            vals.get("amplitude", 1.0),
            vals["a"],
            vals["gamma"],
            vals.get("alpha", alpha),
            vals.get("beta", beta),
        )

    def residuals(p):
        amp, a, gam, al, be = unpack(p)
        inner = a * x**-al + np.exp(-gam / x)
        return np.log(amp) + np.log(inner) - be * x - ln_y

    lower = [1e-12, 1e-12] + ([1e-300] if free_amplitude else []) + ([0.0, 0.0] if cofit else [])
    sol = least_squares(
        residuals, p0, bounds=(lower, np.inf), method="trf", x_scale="jac", max_nfev=10_000
    )
    amp, a, gam, al, be = unpack(sol.x)
    rms = float(np.sqrt(np.mean(sol.fun**2)))
    return FitResult(
        "overall_model",
        {"a": a, "gamma": gam, "amplitude": amp, "alpha": al, "beta": be},
        rms,
        win,
        x.size,
        converged=bool(sol.success),
        extra={"message": sol.message, "nfev": int(sol.nfev)},
    )


def detect_saturation(rows, tolerance: float = 0.02, n_top: int = 3) -> tuple[float, float]:
    """Saturation onset and plateau of an increasing curve.

    The plateau is the mean of the last ``n_top`` grid points, which must
    agree to within ``tolerance`` of each other. The onset is the smallest
    ``x`` whose value lies within ``tolerance`` of the plateau.

    Raises:
        NoPlateauError: the last points have not converged.
    """
    data = np.asarray(list(rows), dtype=float)
    if data.shape[0] < n_top:
        raise NoPlateauError(f"need at least {n_top} points")
    data = data[np.argsort(data[:, 0])]
    top = data[-n_top:, 1]
    if top.min() <= 0 or top.max() / top.min() - 1.0 > tolerance:
        raise NoPlateauError(
            f"last {n_top} points differ by more than {tolerance:.0%}; extend the sweep"
        )
    plateau = float(top.mean())
    close = np.abs(data[:, 1] / plateau - 1.0) <= tolerance
    onset = float(data[np.argmax(close), 0])
    return onset, plateau


def rows_from(x: Iterable[float], y: Iterable[float]) -> list[tuple[float, float]]:
    return list(zip(map(float, x), map(float, y)))


def above_floor(rows: Sequence[tuple[float, float]], floor: float = NEGATIVITY_FLOOR):
    """Drop points whose value is below the numerical floor."""
    return [(x, y) for x, y in rows if y > floor]
