"""Command-line interface: ``lptime <subcommand> --input data.csv ...``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import pipeline as pl
from .basis import lp_transform
from .dataio import load_series, to_json
from .errors import (
    ConfigError,
    LPTimeError,
    DegenerateCopula,
    DegenerateDistribution,
    InsufficientData,
    InsufficientOverlap,
    InvalidProbability,
    ParseError,
    RankDeficient,
    UnstableModel,
)

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

_DATA_ERRORS = (ParseError, DegenerateDistribution, InsufficientData, InsufficientOverlap, InvalidProbability)
_NUMERIC_ERRORS = (UnstableModel, RankDeficient, DegenerateCopula, np.linalg.LinAlgError)

_STAGE_ERRORS = {cls.__name__: cls for cls in (ConfigError,) + _DATA_ERRORS + _NUMERIC_ERRORS}

log = logging.getLogger("lptime")


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str) -> tuple:
    return tuple(int(x) for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("input")
    g.add_argument("--config", help="JSON or key=value file; flags override it")
    g.add_argument("--input", "-i", help="CSV file with a header row")
    g.add_argument("--column", "-c", help="column to analyse")
    g.add_argument("--returns", action="store_const", const=True, default=None,
                   help="treat the column as prices and use log returns")
    g.add_argument("--k", type=int, help="number of score functions (default 4)")
    g.add_argument("--out", "-o", help="output file (default: stdout)")
    g.add_argument("--format", choices=("json", "csv"))
    g.add_argument("--seed", type=int)
    g.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="lptime", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    add("transform", "normalized series Z and score series YS1..YSk (CSV)")
    p = add("qiq", "informative quantile function (CSV)")
    p.add_argument("--grid", type=int, default=99)
    p = add("moments", "LP moments and tail-index (JSON)")
    p.add_argument("--k-moments", type=int, dest="k_moments")
    p.add_argument("--threshold", type=float, dest="tail_threshold")
    p = add("comoment", "lag-h comoment matrix with BIC smoothing (JSON)")
    p.add_argument("--lag", type=int)
    p = add("correlogram", "autocorrelations of each score series (CSV/JSON)")
    p.add_argument("--max-lag", type=int, dest="max_lag")
    p = add("copula", "serial copula density on an N x N grid (CSV)")
    p.add_argument("--lag", type=int)
    p.add_argument("--grid", type=int)
    p = add("autolpinfor", "AutoLPinfor and Granger-Lin by lag (CSV)")
    p.add_argument("--max-lag", type=int, dest="max_lag")
    p.add_argument("--no-granger", action="store_false", dest="granger_lin", default=None)
    add("nonstat", "comoments with the time index (JSON)")
    p = add("quantcorr", "quantile correlation curve with Gaussian reference (JSON/CSV)")
    p.add_argument("--lag", type=int)
    p.add_argument("--grid", type=int, default=99, dest="curve_grid")
    p = add("condinfor", "conditional LPinfor and slice coefficients (JSON/CSV)")
    p.add_argument("--lag", type=int)
    p.add_argument("--grid", type=int, default=99, dest="curve_grid")
    p = add("condquant", "simulated conditional quantile curves (CSV)")
    p.add_argument("--lag", type=int)
    p.add_argument("--u-grid", type=int, dest="u_grid")
    p.add_argument("--levels", type=_floats)
    p.add_argument("--nsim", type=int, dest="n_sim")
    p.add_argument("--qiq", type=int, default=0, help="also emit conditional QIQ on this many points")
    p = add("blomqvist", "medial correlation of Y and per component (JSON)")
    p.add_argument("--lag", type=int)
    p.add_argument("--component", type=_ints, help="restrict the per-component list")
    p = add("spectrum", "Burg/BIC AR spectra of Z and each YS_j (CSV + JSON)")
    p.add_argument("--max-order", type=int, dest="max_order")
    p.add_argument("--grid", type=int, dest="spec_grid")
    p = add("copspec", "copula spectral density at (u, v) (CSV)")
    p.add_argument("--u", type=float, dest="copspec_u")
    p.add_argument("--v", type=float, dest="copspec_v")
    p.add_argument("--H", type=int)
    p.add_argument("--grid", type=int, dest="spec_grid")
    for name, help_ in (("var", "multiple AR model of selected components (JSON)"),
                        ("forecast", "iterated VAR forecasts (CSV)")):
        p = add(name, help_)
        p.add_argument("--components", type=_ints, dest="var_components")
        p.add_argument("--max-order", type=int, dest="var_max_order")
        p.add_argument("--spec-max-order", type=int, dest="max_order")
        if name == "forecast":
            p.add_argument("--steps", type=int, dest="forecast_steps")
    p = add("run", "full pipeline into a bundle directory")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--lag", type=int)
    p.add_argument("--max-lag", type=int, dest="max_lag")
    p.add_argument("--nsim", type=int, dest="n_sim")
    return parser


def make_config(args: argparse.Namespace) -> pl.PipelineConfig:
    base = {}
    if args.config:
        base = pl.read_config_file(args.config)
    cfg = pl.PipelineConfig.from_mapping(base)
    for f in fields(pl.PipelineConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            setattr(cfg, f.name, val)
    if cfg.input is None:
        raise ConfigError("no input file given (--input or config 'input')")
    return cfg.validate()


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def dispatch(args, cfg: pl.PipelineConfig) -> None:
    cmd = args.command
    if cmd == "run":
        manifest = pl.run_pipeline(cfg, args.out_dir)
        stages = manifest["stages"]
        problems = {k: v["error"] for k, v in stages.items() if v["status"] != "ok"}
        sys.stdout.write(to_json({"out_dir": args.out_dir, "complete": manifest["complete"],
                                  "seed": manifest["seed"], "problems": problems}))
        failed = [(k, v) for k, v in stages.items() if v["status"] == "failed"]
        if failed:
            name, info = failed[0]
            raise _STAGE_ERRORS.get(info["error_type"], LPTimeError)(f"stage {name}: {info['error']}")
        return

    sample = load_series(cfg.input, cfg.column, cfg.returns)
    series = lp_transform(sample, cfg.k)
    meta = {"seed": cfg.seed, "k": series.k, "k_capped": series.capped, "T": series.T,
            "conventions": pl.CONVENTIONS}
    out = args.out

    if cmd == "transform":
        _emit(pl.report_transform(series), out)
    elif cmd == "qiq":
        _emit(pl.report_qiq(sample, args.grid), out)
    elif cmd == "moments":
        _emit(to_json({**pl.report_moments(sample, cfg.k_moments, cfg.tail_threshold), "meta": meta}), out)
    elif cmd == "comoment":
        _emit(to_json({**pl.report_comoment(series, cfg.lag), "meta": meta}), out)
    elif cmd == "correlogram":
        text, info = pl.report_correlogram(series, cfg.max_lag)
        _emit(text if cfg.format == "csv" else to_json({**info, "meta": meta}), out)
    elif cmd == "copula":
        _emit(pl.report_copula_grid(series, cfg.lag, cfg.grid), out)
    elif cmd == "autolpinfor":
        _emit(pl.report_autolpinfor(series, cfg.max_lag, cfg.granger_lin), out)
    elif cmd == "nonstat":
        _emit(to_json({**pl.report_nonstat(series), "meta": meta}), out)
    elif cmd in ("quantcorr", "condinfor"):
        build = pl.quantcorr_curves if cmd == "quantcorr" else pl.condinfor_curves
        curves = build(series, cfg.lag, args.curve_grid)
        _emit(pl.columns_csv(curves) if cfg.format == "csv" else to_json({**curves, "meta": meta}), out)
    elif cmd == "condquant":
        text, info, qiq_text = pl.report_condquant(
            sample, series, cfg.lag, pl.unit_grid(cfg.u_grid), cfg.levels, cfg.n_sim, cfg.seed,
            qiq_grid=args.qiq or None,
        )
        _emit(text, out)
        if qiq_text is not None:
            qiq_path = Path(out).with_suffix(".qiq.csv") if out else None
            _emit(qiq_text, qiq_path)
        log.info("condquant meta: %s", to_json(info).strip())
    elif cmd == "blomqvist":
        _emit(to_json({**pl.report_blomqvist(series, cfg.lag, args.component), "meta": meta}), out)
    elif cmd == "spectrum":
        text, info, _ = pl.report_spectrum(series, cfg.max_order, cfg.spec_grid)
        if cfg.format == "csv":
            _emit(text, out)
        else:
            _emit(to_json({**info, "meta": meta}), out)
            if out:
                Path(out).with_suffix(".csv").write_text(text)
    elif cmd == "copspec":
        _emit(pl.report_copspec(series, cfg.copspec_u, cfg.copspec_v, cfg.H, cfg.spec_grid), out)
    elif cmd in ("var", "forecast"):
        comps = cfg.var_components
        if comps is None:
            _, _, spec = pl.report_spectrum(series, cfg.max_order, 8)
            comps = pl.choose_var_components(series, spec.flat_components)
        rep, model = pl.report_var(series, comps, cfg.var_max_order)
        if cmd == "var":
            _emit(to_json({**rep, "meta": meta}), out)
        else:
            _emit(pl.report_forecast(model, series, cfg.forecast_steps), out)
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown command {cmd}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(args)
        dispatch(args, cfg)
    except ConfigError as exc:
        print(f"lptime: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DATA_ERRORS as exc:
        print(f"lptime: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (_NUMERIC_ERRORS + (LPTimeError,)) as exc:
        print(f"lptime: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
