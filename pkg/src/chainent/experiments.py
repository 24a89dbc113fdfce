"""Parameter sweeps over block geometry and chain parameters.

A sweep is a list of :class:`GridPoint` evaluated with :func:`measure_pair`
on a shared read-only kernel per chain. Grid builders encode the default
grids; ``run_*`` functions add the kind-specific summaries.
"""

from __future__ import annotations

import enum
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import analysis
from .chain import CRITICAL_COUPLING, DESK_N_SITES, ChainSpec, CorrelationKernel, build_kernel
from .errors import ConfigError, GeometryError
from .gaussian import BlockPair
from .measures import MeasureRecord, measure_pair

log = logging.getLogger(__name__)

WORKERS_ENV = "CHAINENT_WORKERS"
#: relative tolerance on D/L versus the requested ratio
RATIO_TOLERANCE = 0.02
#: saturation onset threshold relative to the plateau
SATURATION_TOLERANCE = 0.02


class SweepKind(str, enum.Enum):
    CRITICAL_R = "critical_r"
    SCALE_INVARIANCE = "scale_invariance"
    BLOCK_SIZE = "block_size"
    NONCRITICAL_L = "noncritical_l"
    NONCRITICAL_D = "noncritical_d"
    TRANSITION = "transition"


# swept parameter per kind, used for the monotonicity check
_SWEPT = {
    SweepKind.CRITICAL_R: "separation",
    SweepKind.SCALE_INVARIANCE: "block_len",
    SweepKind.BLOCK_SIZE: "block_len",
    SweepKind.NONCRITICAL_L: "block_len",
    SweepKind.NONCRITICAL_D: "separation",
    SweepKind.TRANSITION: "separation",
}


@dataclass(frozen=True)
class GridPoint:
    """One block pair; ``series`` labels the curve it belongs to.

    ``n_sites``/``coupling`` override the sweep's chain for this point.
    """

    series: float
    block_len: int
    separation: int
    n_sites: int | None = None
    coupling: float | None = None

    def chain(self, default: ChainSpec) -> ChainSpec:
        if self.n_sites is None and self.coupling is None:
            return default
        return ChainSpec(
            self.n_sites if self.n_sites is not None else default.n_sites,
            self.coupling if self.coupling is not None else default.coupling,
        )


@dataclass(frozen=True)
class SweepConfig:
    kind: SweepKind
    chain: ChainSpec
    points: tuple[GridPoint, ...]
    output_path: str | None = None
    #: grid-builder arguments, echoed into manifests
    parameters: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", SweepKind(self.kind))
        object.__setattr__(self, "points", tuple(self.points))
        self.validate()

    def validate(self) -> None:
        if not self.points:
            raise ConfigError("grid", "sweep has no grid points")
        last: dict = {}
        swept = _SWEPT[self.kind]
        for i, p in enumerate(self.points):
            spec = p.chain(self.chain)
            try:
                BlockPair(p.block_len, p.separation).check(spec.n_sites)
            except GeometryError as exc:
                raise ConfigError(f"grid.points[{i}]", str(exc)) from None
            key = (p.series, spec.n_sites, spec.coupling)
            value = getattr(p, swept)
            if key in last and value <= last[key]:
                raise ConfigError(
                    f"grid.points[{i}]",
                    f"{swept} must increase strictly within series {p.series}",
                )
            last[key] = value


@dataclass
class SweepRow:
    point: GridPoint
    record: MeasureRecord
    seconds: float = 0.0

    @property
    def values(self) -> dict:
        return {"series": self.point.series, **self.record.as_dict()}


@dataclass
class SweepResult:
    config: SweepConfig
    rows: list[SweepRow]
    metadata: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def column(self, name: str, series: float | None = None) -> np.ndarray:
        return np.array(
            [r.values[name] for r in self.rows if series is None or r.point.series == series]
        )

    def series_labels(self) -> list[float]:
        return list(dict.fromkeys(r.point.series for r in self.rows))

    def curve(self, x: str, y: str, series: float | None = None) -> list[tuple[float, float]]:
        return analysis.rows_from(self.column(x, series), self.column(y, series))


def _workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get(WORKERS_ENV)
    return max(1, int(env)) if env else 1


def run_sweep(config: SweepConfig, workers: int | None = None) -> SweepResult:
    """Evaluate every grid point; rows come back in grid order."""
    kernels: dict[ChainSpec, CorrelationKernel] = {}
    specs = [p.chain(config.chain) for p in config.points]
    for spec in specs:
        if spec not in kernels:
            kernels[spec] = build_kernel(spec)

    def evaluate(item):
        i, (point, spec) = item
        start = time.perf_counter()
        record = measure_pair(kernels[spec], BlockPair(point.block_len, point.separation))
        elapsed = time.perf_counter() - start
        log.info(
            "point %d/%d series=%g L=%d D=%d E_LN=%.6g (%.2fs)",
            i + 1, len(specs), point.series, point.block_len, point.separation,
            record.log_negativity, elapsed,
        )
        return SweepRow(point, record, elapsed)

    items = list(enumerate(zip(config.points, specs)))
    n_workers = _workers(workers)
    if n_workers == 1:
        rows = [evaluate(it) for it in items]
    else:
        with ThreadPoolExecutor(n_workers) as pool:
            rows = list(pool.map(evaluate, items))
    metadata = {
        "kind": config.kind.value,
        "chain": {"n_sites": config.chain.n_sites, "coupling": config.chain.coupling,
                  "xi": config.chain.xi},
        "parameters": config.parameters,
        "n_points": len(rows),
    }
    return SweepResult(config, rows, metadata)


# ---------------------------------------------------------------------------
# grid builders


def _ratio_point(series, block_len, r, check_ratio=True, **kw) -> GridPoint | None:
    sep = int(round(r * block_len))
    if r > 0 and check_ratio and abs(sep / block_len - r) / r > RATIO_TOLERANCE:
        return None
    return GridPoint(series, block_len, sep, **kw)


def critical_r_config(
    n_sites: int = DESK_N_SITES,
    coupling: float = CRITICAL_COUPLING,
    block_len: int = 512,
    r_min: float = 0.05,
    r_max: float = 3.0,
    num: int = 40,
    output_path: str | None = None,
) -> SweepConfig:
    """Fixed L, separation log-spaced so that ``r`` spans ``[r_min, r_max]``."""
    seps = np.unique(np.round(np.geomspace(r_min, r_max, num) * block_len).astype(int))
    points = tuple(GridPoint(float(block_len), block_len, int(s)) for s in seps if s >= 1)
    params = dict(n_sites=n_sites, coupling=coupling, block_len=block_len,
                  r_min=r_min, r_max=r_max, num=num)
    return SweepConfig(SweepKind.CRITICAL_R, ChainSpec(n_sites, coupling), points,
                       output_path, params)


def scale_invariance_config(
    n_sites: int = DESK_N_SITES,
    coupling: float = CRITICAL_COUPLING,
    r_values: Sequence[float] = (0.25, 0.5, 1.0),
    block_lens: Sequence[int] = (128, 256, 512, 1024),
    doubling: bool = True,
    output_path: str | None = None,
) -> SweepConfig:
    """Fixed ratios, L doubling; optionally each point again at (2N, 2L, 2D).

    Points whose rounded D/L misses the ratio by more than 2% are dropped.
    """
    points = []
    for r in r_values:
        for L in sorted(block_lens):
            p = _ratio_point(float(r), int(L), r)
            if p is not None:
                points.append(p)
        if doubling:
            for L in sorted(block_lens):
                p = _ratio_point(float(r), 2 * int(L), r, n_sites=2 * n_sites)
                if p is not None:
                    points.append(p)
    params = dict(n_sites=n_sites, coupling=coupling, r_values=list(r_values),
                  block_lens=list(block_lens), doubling=doubling)
    return SweepConfig(SweepKind.SCALE_INVARIANCE, ChainSpec(n_sites, coupling),
                       tuple(points), output_path, params)


def block_size_config(
    n_sites: int = DESK_N_SITES,
    coupling: float = CRITICAL_COUPLING,
    separations: Sequence[int] = (100,),
    l_min: int = 10,
    l_max: int = 2000,
    num: int = 24,
    output_path: str | None = None,
) -> SweepConfig:
    """Fixed separations D0, block length log-spaced."""
    lens = np.unique(np.round(np.geomspace(l_min, l_max, num)).astype(int))
    points = [GridPoint(float(d0), int(L), int(d0)) for d0 in separations for L in lens]
    params = dict(n_sites=n_sites, coupling=coupling, separations=list(separations),
                  l_min=l_min, l_max=l_max, num=num)
    return SweepConfig(SweepKind.BLOCK_SIZE, ChainSpec(n_sites, coupling),
                       tuple(points), output_path, params)


def _scaled(values, xi_):
    return np.unique(np.round(np.asarray(values) * xi_).astype(int))


def noncritical_l_config(
    n_sites: int = DESK_N_SITES,
    xi: float = 20.0,
    d0_values: Sequence[float] = (1.0, 2.0, 4.0),
    l_min: float = 0.05,
    l_max: float = 12.0,
    l_step: float = 0.25,
    output_path: str | None = None,
) -> SweepConfig:
    """Fixed dimensionless separation d0, block size l = L/xi swept.

    The grid always contains l = d0.
    """
    spec = ChainSpec.from_xi(n_sites, xi)
    ls = np.arange(l_min, l_max + 0.5 * l_step, l_step)
    points = []
    for d0 in d0_values:
        lens = _scaled(np.append(ls, d0), xi)
        points += [GridPoint(float(d0), int(L), int(round(d0 * xi))) for L in lens if L >= 1]
    params = dict(n_sites=n_sites, xi=xi, d0_values=list(d0_values),
                  l_min=l_min, l_max=l_max, l_step=l_step)
    return SweepConfig(SweepKind.NONCRITICAL_L, spec, tuple(points), output_path, params)


def noncritical_d_config(
    n_sites: int = DESK_N_SITES,
    xi: float = 20.0,
    l0_values: Sequence[float] = (2.0, 4.0),
    d_min: float = 0.05,
    d_max: float = 12.0,
    d_step: float = 0.05,
    output_path: str | None = None,
) -> SweepConfig:
    """Fixed dimensionless block size l0, separation d = D/xi swept."""
    spec = ChainSpec.from_xi(n_sites, xi)
    ds = np.arange(d_min, d_max + 0.5 * d_step, d_step)
    points = []
    for l0 in l0_values:
        L = int(round(l0 * xi))
        points += [GridPoint(float(l0), L, int(D)) for D in _scaled(ds, xi) if D >= 1]
    params = dict(n_sites=n_sites, xi=xi, l0_values=list(l0_values),
                  d_min=d_min, d_max=d_max, d_step=d_step)
    return SweepConfig(SweepKind.NONCRITICAL_D, spec, tuple(points), output_path, params)


def transition_config(
    n_sites: int = DESK_N_SITES,
    xi: float = 50.0,
    r_values: Sequence[float] = (0.25, 0.5, 2.0, 4.0),
    d_min: float = 0.05,
    d_max: float = 4.0,
    num: int = 16,
    output_path: str | None = None,
) -> SweepConfig:
    """Fixed ratio r = d/l, separation d log-spaced (l grows with d)."""
    spec = ChainSpec.from_xi(n_sites, xi)
    seps = _scaled(np.geomspace(d_min, d_max, num), xi)
    points = []
    for r in r_values:
        last_len = 0
        for D in seps:
            L = int(round(D / r))
            if D < 1 or L < 1 or L <= last_len:
                continue
            if abs(D / L - r) / r > RATIO_TOLERANCE:
                continue
            points.append(GridPoint(float(r), L, int(D)))
            last_len = L
    params = dict(n_sites=n_sites, xi=xi, r_values=list(r_values),
                  d_min=d_min, d_max=d_max, num=num)
    return SweepConfig(SweepKind.TRANSITION, spec, tuple(points), output_path, params)


BUILDERS = {
    SweepKind.CRITICAL_R: critical_r_config,
    SweepKind.SCALE_INVARIANCE: scale_invariance_config,
    SweepKind.BLOCK_SIZE: block_size_config,
    SweepKind.NONCRITICAL_L: noncritical_l_config,
    SweepKind.NONCRITICAL_D: noncritical_d_config,
    SweepKind.TRANSITION: transition_config,
}


def doubled_config(config: SweepConfig) -> SweepConfig:
    """The same sweep at (2N, 2L, 2D); noncritical chains also double xi.

    Critical-regime values should be unchanged (continuum limit).
    """
    spec = config.chain
    critical = spec.coupling == CRITICAL_COUPLING or spec.xi > 10 * spec.n_sites
    new_spec = (
        ChainSpec(2 * spec.n_sites, spec.coupling)
        if critical
        else ChainSpec.from_xi(2 * spec.n_sites, 2 * spec.xi)
    )
    points = []
    for p in config.points:
        base = p.chain(spec)
        n = 2 * base.n_sites
        coupling = base.coupling if critical else ChainSpec.from_xi(n, 2 * base.xi).coupling
        points.append(
            replace(p, block_len=2 * p.block_len, separation=2 * p.separation,
                    n_sites=n if p.n_sites is not None else None,
                    coupling=coupling if p.coupling is not None else None)
        )
    return SweepConfig(config.kind, new_spec, tuple(points), None,
                       {**config.parameters, "doubled": True})


# ---------------------------------------------------------------------------
# kind-specific runs


def _strictly_decreasing(values) -> bool:
    v = np.asarray(values)
    return bool(np.all(np.diff(v) < 0))


def run_critical_r_sweep(config: SweepConfig, workers: int | None = None) -> SweepResult:
    result = run_sweep(config, workers)
    e = result.column("E_LN_bits")
    result.summary = {
        "E_LN_strictly_decreasing": _strictly_decreasing(e),
        "r_range": [float(result.column("r").min()), float(result.column("r").max())],
    }
    return result


def run_scale_invariance_sweep(config: SweepConfig, workers: int | None = None) -> SweepResult:
    """Adds a flatness statistic per ratio: max - min of ln E over the upper half of L."""
    result = run_sweep(config, workers)
    flat = {}
    for r in result.series_labels():
        base = [row for row in result.rows
                if row.point.series == r and row.record.spec.n_sites == config.chain.n_sites]
        upper = base[len(base) // 2:] if len(base) > 1 else base
        for name, attr in (("E_LN", "log_negativity"), ("I", "mutual_information")):
            vals = np.log([getattr(row.record, attr) for row in upper])
            flat.setdefault(name, {})[str(r)] = float(vals.max() - vals.min())
    doubling = []
    by_key = {(row.point.series, row.record.spec.n_sites, row.point.block_len): row
              for row in result.rows}
    for row in result.rows:
        if row.record.spec.n_sites != config.chain.n_sites:
            continue
        twin = by_key.get((row.point.series, 2 * config.chain.n_sites, 2 * row.point.block_len))
        if twin is None:
            continue
        e1, e2 = row.record.log_negativity, twin.record.log_negativity
        doubling.append({"r": row.point.series, "L": row.point.block_len,
                         "E_LN": e1, "E_LN_doubled": e2, "rel_diff": abs(e2 / e1 - 1.0)})
    result.summary = {"flatness": flat, "doubling": doubling}
    return result


def run_block_size_sweep(config: SweepConfig, workers: int | None = None) -> SweepResult:
    """Adds the log-log slope series and its crossings of 2 per separation."""
    result = run_sweep(config, workers)
    slopes, saddles = {}, {}
    for d0 in result.series_labels():
        s = analysis.loglog_slope(analysis.above_floor(result.curve("L", "E_LN_bits", d0)))
        slopes[str(d0)] = s
        saddles[str(d0)] = analysis.level_crossings(s, 2.0)
    result.summary = {"loglog_slope": slopes, "slope_two_crossings": saddles}
    return result


def run_noncritical_l_sweep(config: SweepConfig, workers: int | None = None) -> SweepResult:
    """Adds plateau, onset l_s and E(l = d0) per d0."""
    result = run_sweep(config, workers)
    per = {}
    xi_ = config.chain.xi
    for d0 in result.series_labels():
        curve = result.curve("l", "E_LN_bits", d0)
        entry = {}
        try:
            onset, plateau = analysis.detect_saturation(curve, SATURATION_TOLERANCE)
            entry.update(l_s=onset, plateau=plateau)
        except analysis.NoPlateauError as exc:
            entry["error"] = str(exc)
        at = [row.record.log_negativity for row in result.rows
              if row.point.series == d0 and row.point.block_len == int(round(d0 * xi_))]
        if at:
            entry["E_at_l_eq_d0"] = at[0]
        per[str(d0)] = entry
    result.summary = {"per_d0": per}
    return result


def run_noncritical_d_sweep(
    config: SweepConfig, workers: int | None = None, head_max: float = 0.5
) -> SweepResult:
    """Adds, per l0, the tail fits (exp in d and in d^2) and the head power law."""
    result = run_sweep(config, workers)
    per = {}
    for l0 in result.series_labels():
        curve = result.curve("d", "E_LN_bits", l0)
        lo = max(l0, 1.0)
        tail = [(d, e) for d, e in analysis.above_floor(curve) if d > lo]
        entry: dict = {"tail_window": [lo, max((d for d, _ in tail), default=lo)]}
        try:
            quad = analysis.fit_quadratic_exponent(tail)
            lin = analysis.fit_exponential(tail)
            entry.update(beta_nc=quad["beta"], quad_rms=quad.residual_rms,
                         linear_rate=lin["rate"], linear_rms=lin.residual_rms)
        except analysis.FitError as exc:
            entry["tail_error"] = str(exc)
        try:
            head = analysis.fit_power([(d, e) for d, e in curve if d <= head_max])
            entry.update(head_exponent=head["exponent"], head_rms=head.residual_rms)
        except analysis.FitError as exc:
            entry["head_error"] = str(exc)
        per[str(l0)] = entry
    result.summary = {"per_l0": per}
    return result


def run_transition_sweep(
    config: SweepConfig,
    workers: int | None = None,
    flat_tolerance: float = 0.1,
    window: tuple[float, float] = (2.0, 4.0),
) -> SweepResult:
    """Adds departure points from the flat regime and the r < 1 coincidence check.

    The departure point of a curve is the first d whose ln E differs from
    the first grid value by more than ``flat_tolerance``. Coincidence is the
    largest pairwise |ln E| difference between r < 1 curves, linearly
    interpolated onto a common d grid inside ``window``.
    """
    result = run_sweep(config, workers)
    departures, curves = {}, {}
    for r in result.series_labels():
        d = result.column("d", r)
        ln_e = np.log(np.maximum(result.column("E_LN_bits", r), 1e-300))
        curves[r] = (d, ln_e)
        moved = np.abs(ln_e - ln_e[0]) > flat_tolerance
        departures[str(r)] = float(d[np.argmax(moved)]) if moved.any() else None

    def spread(labels):
        grid = np.linspace(*window, 9)
        lo, hi = window[0] * (1 + 1e-9), window[1] * (1 - 1e-9)  # d = D/xi round-off
        usable = [r for r in labels if curves[r][0][0] <= lo and curves[r][0][-1] >= hi]
        if len(usable) < 2:
            return None
        vals = [np.interp(grid, *curves[r]) for r in usable]
        return float(max(np.max(np.abs(a - b)) for i, a in enumerate(vals) for b in vals[i + 1:]))

    labels = result.series_labels()
    result.summary = {
        "departure_d": departures,
        "coincidence_r_lt_1": spread([r for r in labels if r < 1]),
        "spread_r_gt_1": spread([r for r in labels if r > 1]),
        "window": list(window),
    }
    return result


RUNNERS = {
    SweepKind.CRITICAL_R: run_critical_r_sweep,
    SweepKind.SCALE_INVARIANCE: run_scale_invariance_sweep,
    SweepKind.BLOCK_SIZE: run_block_size_sweep,
    SweepKind.NONCRITICAL_L: run_noncritical_l_sweep,
    SweepKind.NONCRITICAL_D: run_noncritical_d_sweep,
    SweepKind.TRANSITION: run_transition_sweep,
}


def run(config: SweepConfig, workers: int | None = None) -> SweepResult:
    """Dispatch to the kind-specific runner."""
    return RUNNERS[config.kind](config, workers)
