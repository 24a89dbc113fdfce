"""Sweep configuration files, CSV results and JSON manifests.

Config files are YAML::

    schema_version: 1
    kind: critical_r            # see SweepKind
    chain:                      # n_sites plus one of coupling / xi
      n_sites: 8192
      coupling: 0.999999999999
    grid:                       # keyword arguments of the kind's grid builder,
      block_len: 512            # or an explicit list of points
      num: 40
    output:
      path: results/critical_r.csv

An explicit grid is ``grid: {points: [[L, D], ...]}`` or a list of mappings
with keys ``L``, ``D`` and optional ``series``.
"""

from __future__ import annotations

import csv
import hashlib
import inspect
import io
import json
import math
import os
import platform
import sys
import time
from importlib import metadata as importlib_metadata
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from .chain import ChainSpec
from .errors import ConfigError, DomainError
from .experiments import BUILDERS, GridPoint, SweepConfig, SweepKind, SweepResult

SCHEMA_VERSION = 1

CSV_COLUMNS = (
    "series", "n_sites", "coupling", "L", "D", "r", "d", "l",
    "S_A", "S_B", "S_AB", "I_nats", "E_LN_bits",
)
_RECORD_KEYS = {"S_A": "S_A_nats", "S_B": "S_B_nats", "S_AB": "S_AB_nats"}
_INT_COLUMNS = {"n_sites", "L", "D"}

UNITS = {"S_A": "nats", "S_B": "nats", "S_AB": "nats", "I_nats": "nats", "E_LN_bits": "bits"}


def tool_version() -> str:
    try:
        return importlib_metadata.version("chainent")
    except importlib_metadata.PackageNotFoundError:
        from . import __version__

        return __version__


def format_number(value: Any) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


# ---------------------------------------------------------------------------
# config


def _chain_from(section: Any) -> ChainSpec:
    if not isinstance(section, Mapping):
        raise ConfigError("chain", "must be a mapping")
    unknown = set(section) - {"n_sites", "coupling", "xi", "preset"}
    if unknown:
        raise ConfigError(f"chain.{sorted(unknown)[0]}", "unknown field")
    if "n_sites" not in section:
        raise ConfigError("chain.n_sites", "required")
    n = section["n_sites"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ConfigError("chain.n_sites", f"must be an integer, got {n!r}")
    given = [k for k in ("coupling", "xi", "preset") if k in section]
    if len(given) != 1:
        raise ConfigError("chain", "give exactly one of coupling, xi, preset")
    key = given[0]
    try:
        if key == "preset":
            if section["preset"] != "critical":
                raise ConfigError("chain.preset", f"unknown preset {section['preset']!r}")
            return ChainSpec.critical(n)
        value = float(section[key])
        return ChainSpec(n, value) if key == "coupling" else ChainSpec.from_xi(n, value)
    except (DomainError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"chain.{key}", str(exc)) from None


def _explicit_points(points: Any) -> list[GridPoint]:
    if not isinstance(points, list) or not points:
        raise ConfigError("grid.points", "must be a non-empty list")
    out = []
    for i, item in enumerate(points):
        path = f"grid.points[{i}]"
        if isinstance(item, Mapping):
            try:
                out.append(GridPoint(float(item.get("series", 0.0)), int(item["L"]), int(item["D"])))
            except KeyError as exc:
                raise ConfigError(f"{path}.{exc.args[0]}", "required") from None
        elif isinstance(item, (list, tuple)) and len(item) == 2:
            out.append(GridPoint(0.0, int(item[0]), int(item[1])))
        else:
            raise ConfigError(path, "expected [L, D] or {L, D, series}")
    return out


def config_from_mapping(raw: Any) -> SweepConfig:
    if not isinstance(raw, Mapping):
        raise ConfigError("<root>", "config must be a mapping")
    unknown = set(raw) - {"schema_version", "kind", "chain", "grid", "output"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")
    try:
        kind = SweepKind(raw.get("kind"))
    except ValueError:
        choices = ", ".join(k.value for k in SweepKind)
        raise ConfigError("kind", f"must be one of {choices}") from None
    chain = _chain_from(raw.get("chain"))
    grid = raw.get("grid") or {}
    if not isinstance(grid, Mapping):
        raise ConfigError("grid", "must be a mapping")
    output = raw.get("output") or {}
    if not isinstance(output, Mapping) or set(output) - {"path"}:
        raise ConfigError("output", "only 'path' is allowed")
    out_path = output.get("path")

    if "points" in grid:
        if set(grid) != {"points"}:
            raise ConfigError("grid", "explicit points cannot be mixed with builder arguments")
        return SweepConfig(kind, chain, tuple(_explicit_points(grid["points"])), out_path,
                           {"points": "explicit"})

    builder = BUILDERS[kind]
    accepted = set(inspect.signature(builder).parameters) - {"n_sites", "coupling", "xi", "output_path"}
    for key in grid:
        if key not in accepted:
            raise ConfigError(f"grid.{key}", f"unknown field for kind {kind.value}")
    kwargs = dict(grid)
    kwargs["n_sites"] = chain.n_sites
    params = inspect.signature(builder).parameters
    if "coupling" in params:
        kwargs["coupling"] = chain.coupling
    else:
        kwargs["xi"] = chain.xi
    try:
        return builder(output_path=out_path, **kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError("grid", str(exc)) from None


def load_config(path: str | os.PathLike) -> SweepConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"invalid YAML: {exc}") from None
    return config_from_mapping(raw)


def config_hash(config: SweepConfig) -> str:
    """SHA-256 over the canonical JSON of the resolved grid and chain."""
    payload = {
        "kind": config.kind.value,
        "chain": [config.chain.n_sites, format_number(config.chain.coupling)],
        "points": [
            [format_number(p.series), p.block_len, p.separation, p.n_sites,
             None if p.coupling is None else format_number(p.coupling)]
            for p in config.points
        ],
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


# ---------------------------------------------------------------------------
# results


def result_rows(result: SweepResult) -> list[dict]:
    rows = []
    for row in result.rows:
        values = row.values
        rows.append({c: values[_RECORD_KEYS.get(c, c)] for c in CSV_COLUMNS})
    return rows


def csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in result_rows(result):
        writer.writerow([format_number(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def read_csv(path: str | os.PathLike) -> list[dict]:
    """Parse a result CSV back into typed rows."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for raw in reader:
            rows.append({k: (int(v) if k in _INT_COLUMNS else float(v)) for k, v in raw.items()})
        fields = reader.fieldnames or []
    if not fields:
        raise ValueError(f"{path}: empty file")
    return rows


def manifest(result: SweepResult, argv: list[str] | None = None) -> dict:
    cfg = result.config
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": tool_version(),
        "command_line": list(sys.argv if argv is None else argv),
        "config_hash": config_hash(cfg),
        "kind": cfg.kind.value,
        "chain": {"n_sites": cfg.chain.n_sites, "coupling": cfg.chain.coupling,
                  "xi": cfg.chain.xi, "mass": cfg.chain.mass},
        "grid": {
            "n_points": len(cfg.points),
            "series": sorted({p.series for p in cfg.points}),
            "L_range": [min(p.block_len for p in cfg.points), max(p.block_len for p in cfg.points)],
            "D_range": [min(p.separation for p in cfg.points), max(p.separation for p in cfg.points)],
            "parameters": cfg.parameters,
        },
        "units": UNITS,
        "seconds_per_point": [round(r.seconds, 6) for r in result.rows],
        "summary": _jsonable(result.summary),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "platform": platform.platform(),
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return None if not math.isfinite(float(obj)) else float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: str | os.PathLike, payload: Any) -> None:
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def write_result(
    result: SweepResult,
    csv_path: str | os.PathLike,
    force: bool = False,
    argv: list[str] | None = None,
) -> tuple[Path, Path]:
    """Write the CSV and its ``.manifest.json`` companion.

    Raises:
        FileExistsError: an output exists and ``force`` is not set.
    """
    csv_path = Path(csv_path)
    manifest_path = csv_path.with_suffix(".manifest.json")
    for p in (csv_path, manifest_path):
        if p.exists() and not force:
            raise FileExistsError(f"{p} exists; use --force to overwrite")
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    text = csv_text(result)
    meta = manifest(result, argv)
    csv_path.write_text(text)
    write_json(manifest_path, meta)
    return csv_path, manifest_path


def write_curves(result: SweepResult, directory: Path, stem: str, x: str, y: str) -> list[Path]:
    """Two-column plot data, one file per series."""
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for label in result.series_labels():
        path = directory / f"{stem}_series_{format_number(label)}.dat"
        lines = [f"# {x} {y}"]
        lines += [f"{format_number(a)} {format_number(b)}" for a, b in result.curve(x, y, label)]
        path.write_text("\n".join(lines) + "\n")
        paths.append(path)
    return paths
