"""Command-line entry point: ``chainent <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import analysis, oracle
from . import experiments as ex
from . import io as cio
from .chain import DESK_N_SITES, ChainSpec, build_kernel
from .errors import ChainentError
from .gaussian import BlockPair
from .measures import measure_pair
from .reproduce import FIGURES, PROFILES, reproduce

log = logging.getLogger("chainent")

FIT_MODELS = ("exp", "power", "quadratic", "linear", "residual-power", "overall",
              "loglog", "saturation")
#: window used to estimate beta when ``--beta auto``
AUTO_BETA_WINDOW = (0.5, 2.5)


def _chain_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-sites", type=int, default=DESK_N_SITES, help="chain length N")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--coupling", type=float, help="coupling alpha in [0, 1)")
    grp.add_argument("--xi", type=float, help="correlation length (alternative to --coupling)")


def _chain_from_args(args) -> ChainSpec:
    if args.xi is not None:
        return ChainSpec.from_xi(args.n_sites, args.xi)
    if args.coupling is not None:
        return ChainSpec(args.n_sites, args.coupling)
    return ChainSpec.critical(args.n_sites)


def cmd_measure(args) -> int:
    spec = _chain_from_args(args)
    pair = BlockPair(args.block_len, args.separation, args.offset)
    pair.check(spec.n_sites)
    if args.offset >= spec.n_sites:
        raise ChainentError(f"offset {args.offset} outside the ring of {spec.n_sites} sites")
    values = measure_pair(build_kernel(spec), pair).as_dict()
    if args.format == "json":
        sys.stdout.write(json.dumps(values, indent=2) + "\n")
    else:
        keys = list(values)
        sys.stdout.write(",".join(keys) + "\n")
        sys.stdout.write(",".join(cio.format_number(values[k]) for k in keys) + "\n")
    return 0


def _resolve_output(args, config: ex.SweepConfig, default_name: str) -> Path:
    path = Path(args.output or config.output_path or default_name)
    if not path.is_absolute():
        path = Path(args.out_dir) / path
    return path


def cmd_sweep(args) -> int:
    config = cio.load_config(args.config)
    out = _resolve_output(args, config, f"{config.kind.value}.csv")
    for p in (out, out.with_suffix(".manifest.json")):
        if p.exists() and not args.force:
            raise FileExistsError(f"{p} exists; use --force to overwrite")
    result = ex.run(config, args.workers)
    csv_path, manifest_path = cio.write_result(result, out, force=args.force)
    log.info("wrote %s and %s", csv_path, manifest_path)
    return 0


def _fit_rows(args):
    rows = cio.read_csv(args.result)
    if not rows:
        raise analysis.FitError(f"{args.result} has no data rows")
    for col in (args.x, args.y):
        if col not in rows[0]:
            raise analysis.FitError(f"column {col!r} not found in {args.result}")
    if args.series is not None:
        rows = [r for r in rows if r["series"] == args.series]
    return [(r[args.x], r[args.y]) for r in rows]


def cmd_fit(args) -> int:
    data = _fit_rows(args)
    window = tuple(args.window) if args.window else None
    model = args.model
    if model == "exp":
        report = analysis.fit_exponential(data, window).as_dict()
    elif model == "power":
        report = analysis.fit_power(data, window).as_dict()
    elif model == "quadratic":
        report = analysis.fit_quadratic_exponent(data, window).as_dict()
    elif model == "linear":
        report = analysis.fit_linear(data, window).as_dict()
    elif model == "residual-power":
        beta = (analysis.fit_exponential(data, AUTO_BETA_WINDOW)["rate"]
                if args.beta == "auto" else float(args.beta))
        report = analysis.residual_power(data, beta, window).as_dict()
    elif model == "overall":
        report = analysis.fit_overall_model(data, window or (0.1, 2.5)).as_dict()
    elif model == "loglog":
        slopes = analysis.loglog_slope(data)
        report = {"model": "loglog_slope", "slopes": slopes,
                  "slope_two_crossings": analysis.level_crossings(slopes, 2.0)}
    else:
        onset, plateau = analysis.detect_saturation(data)
        report = {"model": "saturation", "onset": onset, "plateau": plateau}
    report["source"] = str(args.result)
    text = json.dumps(cio._jsonable(report), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_reproduce(args) -> int:
    out_dir = Path(args.out_dir) / args.figure
    rep = reproduce(args.figure, args.profile, args.workers)
    for name, result in rep.results.items():
        cio.write_result(result, out_dir / f"{name}.csv", force=args.force)
    for name, x, y in rep.curves:
        cio.write_curves(rep.results[name], out_dir / "curves", f"{name}_{y}_vs_{x}", x, y)
    cio.write_json(out_dir / "summary.json", rep.summary())
    for c in rep.comparisons:
        print(c.line())
    return 0


def cmd_kernel(args) -> int:
    kernel = build_kernel(_chain_from_args(args))
    if args.output:
        with open(args.output, "w") as fh:
            kernel.export(fh, args.export)
    else:
        kernel.export(sys.stdout, args.export)
    return 0


def cmd_self_check(args) -> int:
    reports = oracle.self_check(kernel_sizes=oracle.SELF_CHECK_SIZES + (1024,))
    for r in reports:
        print(r.summary())
    return 0 if all(r.passed for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainent",
        description="Entanglement between blocks of a periodic harmonic chain.",
    )
    parser.add_argument("--self-check", action="store_true",
                        help="run the oracle comparison grid and exit")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("measure", help="all measures for one block pair")
    _chain_args(p)
    p.add_argument("--block-len", type=int, required=True)
    p.add_argument("--separation", type=int, required=True)
    p.add_argument("--offset", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("sweep", help="run a sweep from a YAML config")
    p.add_argument("config")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--output", help="CSV path (overrides output.path)")
    p.add_argument("--force", action="store_true", help="overwrite existing outputs")
    p.add_argument("--workers", type=int, help=f"threads (default ${ex.WORKERS_ENV} or 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="fit a model to a sweep CSV")
    p.add_argument("result")
    p.add_argument("--model", choices=FIT_MODELS, default="exp")
    p.add_argument("--x", default="r")
    p.add_argument("--y", default="E_LN_bits")
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--series", type=float)
    p.add_argument("--beta", default="auto",
                   help="decay removed before residual-power fits ('auto' fits it on r in [0.5, 2.5])")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("reproduce", help="canned sweep + fits for one figure")
    p.add_argument("figure", choices=sorted(FIGURES))
    p.add_argument("--profile", choices=sorted(PROFILES), default="desk")
    p.add_argument("--out-dir", default="results")
    p.add_argument("--force", action="store_true")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("kernel", help="export a correlator as 'lag value' lines")
    _chain_args(p)
    p.add_argument("--export", choices=("g", "h"), default="g")
    p.add_argument("--output")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("self-check", help="oracle comparison grid")
    p.set_defaults(func=cmd_self_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING if args.quiet else (logging.DEBUG if args.verbose > 1 else logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.self_check:
        return cmd_self_check(args)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ChainentError, ValueError, OSError) as exc:
        print(f"chainent: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
