"""Pipeline configuration, per-stage report builders and the bundle runner."""
from __future__ import annotations

import json
import logging
import traceback
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .basis import DEFAULT_K, DEFAULT_K_MOMENTS, LPSeries, lp_transform
from .comoment import (
    ComomentMatrix,
    bic_smooth,
    comoment,
    lp_autocorrelation,
    lp_correlogram,
    lpinfor_stat,
    nonstationarity_comoment,
)
from .conditional import DEFAULT_LEVELS, conditional_qiq, conditional_quantile_curves
from .copula import (
    CopulaModel,
    auto_lpinfor,
    blomqvist_beta,
    conditional_lpinfor,
    gaussian_copula_curve,
    granger_lin,
    quantile_correlation,
)
from .dataio import load_series, to_csv, to_json
from .empirical import SeriesSample, qiq_curve
from .errors import ConfigError
from .moments import TAIL_THRESHOLD, lp_moment_normal_first, lp_moments, lp_tail_index, nearest_reference
from .spectrum import (
    DEFAULT_H,
    copula_spectral_density,
    frequency_grid,
    lp_spectrum,
)
from .var import fit_var, forecast, residual_diagnostics

log = logging.getLogger(__name__)

CONVENTIONS = {
    "variance_divisor": "T (population form)",
    "quantile": "left-continuous inverse of the empirical CDF",
    "comoment_normalization": "1/(T-h) over the overlap window, no re-centring",
    "json_significant_digits": 10,
    "csv_significant_digits": 8,
}


@dataclass
class PipelineConfig:
    input: Optional[str] = None
    column: Optional[str] = None
    returns: bool = False
    k: int = DEFAULT_K
    k_moments: int = DEFAULT_K_MOMENTS
    tail_threshold: float = TAIL_THRESHOLD
    lag: int = 1
    max_lag: int = 20
    grid: int = 50
    u_grid: int = 21
    cond_u: tuple = (0.01, 0.5, 0.99)
    levels: tuple = DEFAULT_LEVELS
    n_sim: int = 10_000
    seed: Optional[int] = None
    max_order: int = 20
    spec_grid: int = 512
    H: int = DEFAULT_H
    copspec_u: float = 0.1
    copspec_v: float = 0.1
    var_components: Optional[tuple] = None
    var_max_order: int = 12
    forecast_steps: int = 10
    granger_lin: bool = True
    format: str = "json"

    def validate(self) -> "PipelineConfig":
        checks = [
            (self.k >= 1, "k must be >= 1"),
            (self.k_moments >= 1, "k_moments must be >= 1"),
            (0 < self.tail_threshold < 1, "tail_threshold must lie in (0, 1)"),
            (self.lag >= 1, "lag must be >= 1"),
            (self.max_lag >= 1, "max_lag must be >= 1"),
            (self.grid >= 1 and self.u_grid >= 1, "grids need at least one point"),
            (self.n_sim >= 1, "n_sim must be >= 1"),
            (self.max_order >= 0 and self.var_max_order >= 0, "orders must be >= 0"),
            (self.H >= 1, "H must be >= 1"),
            (all(0 < x < 1 for x in self.levels), "levels must lie in (0, 1)"),
            (list(self.levels) == sorted(self.levels), "levels must be ascending"),
            (all(0 < x < 1 for x in self.cond_u), "cond_u must lie in (0, 1)"),
            (0 < self.copspec_u < 1 and 0 < self.copspec_v < 1, "copspec u, v must lie in (0, 1)"),
            (self.format in ("json", "csv"), "format must be json or csv"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        if self.seed is None:
            self.seed = int(np.random.SeedSequence().entropy % (2**63))
        return self

    @classmethod
    def from_mapping(cls, data: dict) -> "PipelineConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in data.items():
            name = key.replace("-", "_")
            if name not in known:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[name] = _coerce(name, raw, known[name].default)
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        return cls.from_mapping(read_config_file(path))


def read_config_file(path) -> dict:
    """JSON object, or ``key=value`` lines (``#`` comments allowed)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            return json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from exc
    out = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def _coerce(name: str, raw, default):
    if not isinstance(raw, str):
        if isinstance(raw, list):
            return tuple(raw)
        return raw
    try:
        if name in ("levels", "cond_u"):
            return tuple(float(x) for x in raw.split(","))
        if name == "var_components":
            return tuple(int(x) for x in raw.split(",")) if raw else None
        if isinstance(default, bool) or name in ("returns", "granger_lin"):
            return raw.lower() in ("1", "true", "yes", "on")
        if isinstance(default, int) or name == "seed":
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc
    return raw


def unit_grid(n: int) -> np.ndarray:
    """``n`` interior points ``i/(n+1)``."""
    return np.arange(1, n + 1) / (n + 1)


# ---------------------------------------------------------------------------
# report builders; each returns text (CSV) or a JSON-ready dict


def report_transform(series: LPSeries) -> str:
    header = ["Z"] + [f"YS{j}" for j in range(1, series.k + 1)]
    return to_csv(header, [series.z] + [series.column(j) for j in range(1, series.k + 1)])


def report_qiq(sample, n: int) -> str:
    curve = qiq_curve(sample, unit_grid(n))
    return to_csv(["u", "qiq"], [curve.grid, curve.qiq])


def report_moments(sample, k_moments: int, threshold: float = TAIL_THRESHOLD) -> dict:
    mom = lp_moments(sample, k_moments)
    ti = lp_tail_index(mom, threshold)
    name, dist = nearest_reference(mom)
    return {
        "lp": mom.values,
        "cumsum": mom.cumsum,
        "k_moments": mom.k,
        "tail_index": ti.index,
        "saturated": ti.saturated,
        "threshold": threshold,
        "nearest_reference": {"name": name, "distance": dist},
        "normal_lp1_reference": lp_moment_normal_first(),
    }


def report_comoment(series: LPSeries, lag: int) -> dict:
    mat = comoment(series, lag)
    mom = (series.z @ series.matrix) / series.T
    smooth_mom = bic_smooth_vector(mom, series.T)
    return {
        "lag": lag,
        "n": mat.n,
        "raw": mat.raw,
        "smooth": mat.smooth,
        "mask": mat.mask,
        "bic_path": mat.bic_path,
        "selected": int(mat.mask.sum()),
        "lp_moments": mom,
        "lp_moments_smooth": smooth_mom,
        "pearson_lp_raw": lp_autocorrelation(mom, mom, mat, use_smooth=False),
        "pearson_lp_smooth": lp_autocorrelation(smooth_mom, smooth_mom, mat, use_smooth=True),
        "pearson_classical": float(np.mean(series.z[:-lag] * series.z[lag:])),
        "lpinfor": lpinfor_stat(mat),
    }


def bic_smooth_vector(values: np.ndarray, n: int) -> np.ndarray:
    """BIC selection applied to a vector of LP moments (as a 1 x k matrix)."""
    mat = bic_smooth(ComomentMatrix(0, np.atleast_2d(values), n))
    return mat.smooth[0]


def report_correlogram(series: LPSeries, max_lag: int) -> tuple[str, dict]:
    cg = lp_correlogram(series, max_lag)
    header = ["lag"] + [f"YS{j}" for j in range(1, series.k + 1)]
    text = to_csv(header, [cg.lags] + list(cg.table))
    meta = {"band": cg.band, "lags": cg.lags, "table": cg.table,
            "outside_fraction": cg.outside_band().mean(axis=1)}
    return text, meta


def report_copula_grid(series: LPSeries, lag: int, n: int) -> str:
    model = CopulaModel.from_comoment(comoment(series, lag), series.basis)
    g = unit_grid(n)
    dens = model.density_grid(g, g)
    uu, vv = np.meshgrid(g, g, indexing="ij")
    return to_csv(["u", "v", "density"], [uu.ravel(), vv.ravel(), dens.ravel()])


def report_autolpinfor(series: LPSeries, max_lag: int, with_granger: bool = True) -> str:
    lags = np.arange(1, max_lag + 1)
    auto, gl = [], []
    for h in lags:
        model = CopulaModel.from_comoment(comoment(series, int(h)), series.basis)
        auto.append(auto_lpinfor(model))
        gl.append(granger_lin(model) if with_granger else np.nan)
    return to_csv(["lag", "autolpinfor", "granger_lin"], [lags, auto, gl])


def report_nonstat(series: LPSeries) -> dict:
    mat = bic_smooth(nonstationarity_comoment(series))
    return {
        "raw": mat.raw,
        "smooth": mat.smooth,
        "mask": mat.mask,
        "bic_path": mat.bic_path,
        "lpinfor_raw": lpinfor_stat(mat, use_smooth=False),
        "lpinfor_smooth": lpinfor_stat(mat, use_smooth=True),
        "band": 4.0 / np.sqrt(series.T),
    }


def quantcorr_curves(series: LPSeries, lag: int, n: int) -> dict:
    model = CopulaModel.from_comoment(comoment(series, lag), series.basis)
    g = unit_grid(n)
    rho = float(np.clip(np.mean(series.z[:-lag] * series.z[lag:]), -1, 1))
    return {"u": g, "lp": quantile_correlation(model, g), "gaussian": gaussian_copula_curve(rho, g),
            "independence": np.minimum(g, 1 - g), "gaussian_rho": rho}


def report_quantcorr(series: LPSeries, lag: int, n: int) -> str:
    return columns_csv(quantcorr_curves(series, lag, n))


def condinfor_curves(series: LPSeries, lag: int, n: int) -> dict:
    model = CopulaModel.from_comoment(comoment(series, lag), series.basis)
    g = unit_grid(n)
    betas = model.slice_coefficients(g)
    out = {"u": g, "lpinfor": conditional_lpinfor(model, g)}
    out.update({f"beta{m}": betas[:, m - 1] for m in range(1, betas.shape[1] + 1)})
    return out


def report_condinfor(series: LPSeries, lag: int, n: int) -> str:
    return columns_csv(condinfor_curves(series, lag, n))


def columns_csv(curves: dict) -> str:
    """CSV of the array-valued entries; scalars are left to the JSON form."""
    cols = {k: v for k, v in curves.items() if np.ndim(v) == 1}
    return to_csv(list(cols), list(cols.values()))


def report_condquant(sample, series: LPSeries, lag: int, u_values, levels, n_sim: int, seed: int,
                     qiq_grid: Optional[int] = None) -> tuple[str, dict, Optional[str]]:
    model = CopulaModel.from_comoment(comoment(series, lag), series.basis)
    curves = conditional_quantile_curves(sample, model, u_values, levels, n_sim, seed)
    header = ["u"] + [f"q{lv:g}" for lv in curves.levels] + ["acceptance"]
    text = to_csv(header, [curves.u_grid] + list(curves.values.T) + [curves.acceptance])
    meta = {
        "seed": curves.seed,
        "n_sim": n_sim,
        "levels": curves.levels,
        "extreme_levels": curves.levels[curves.levels < 1.0 / n_sim],
        "min_acceptance": float(curves.acceptance.min()),
    }
    qiq_text = None
    if qiq_grid:
        g = unit_grid(qiq_grid)
        cols = [g]
        for cond in curves.samples:
            cols.append(conditional_qiq(cond, g).qiq)
        qiq_text = to_csv(["v"] + [f"u{u:g}" for u in curves.u_grid], cols)
    return text, meta, qiq_text


def report_blomqvist(series: LPSeries, lag: int, components: Optional[list] = None) -> dict:
    """Serial medial correlation of Y and of each transformed component."""
    model = CopulaModel.from_comoment(comoment(series, lag), series.basis)
    out = {"lag": lag, "Y": blomqvist_beta(model), "components": {}}
    comps = range(1, series.k + 1) if components is None else components
    for j in comps:
        try:
            sub = lp_transform(SeriesSample(series.column(j)), series.basis.requested_k)
            sub_model = CopulaModel.from_comoment(comoment(sub, lag), sub.basis)
            out["components"][f"YS{j}"] = blomqvist_beta(sub_model)
        except Exception as exc:  # a degenerate component should not sink the rest
            out["components"][f"YS{j}"] = None
            out.setdefault("errors", {})[f"YS{j}"] = str(exc)
    return out


def report_spectrum(series: LPSeries, max_order: int, n: int) -> tuple[str, dict, object]:
    spec = lp_spectrum(series, max_order, frequency_grid(n))
    keys = list(spec.curves)
    header = ["omega"] + [("Z" if k == "Z" else f"YS{k}") for k in keys]
    text = to_csv(header, [spec.omega] + [spec.curves[k].density for k in keys])
    meta = {
        "orders": {("Z" if k == "Z" else f"YS{k}"): v for k, v in spec.orders.items()},
        "flat": [f"YS{j}" for j in spec.flat_components],
        "criterion": "bic",
        "max_order": max_order,
    }
    return text, meta, spec


def report_copspec(series: LPSeries, u: float, v: float, H: int, n: int) -> str:
    H = min(H, series.T - 10)
    models = [CopulaModel.from_comoment(comoment(series, h), series.basis) for h in range(1, H + 1)]
    cs = copula_spectral_density(models, u, v, frequency_grid(n))
    return to_csv(["omega", "density", "imag"], [cs.omega, cs.density, cs.imag])


def choose_var_components(series: LPSeries, flat: Optional[list]) -> tuple:
    if flat is None:
        return tuple(range(1, series.k + 1))
    keep = tuple(j for j in range(1, series.k + 1) if j not in flat)
    return keep or tuple(range(1, series.k + 1))


def report_var(series: LPSeries, components, max_order: int) -> tuple[dict, object]:
    model = fit_var(series, components, max_order)
    diag = residual_diagnostics(model)
    return {
        "components": list(model.components),
        "order": model.order,
        "A": model.coefs,
        "sigma": model.sigma,
        "bic_trace": model.bic_trace,
        "n_common": model.n_common,
        "spectral_radius": model.spectral_radius(),
        "stable": model.stable,
        "residual_diagnostics": {
            "band": diag.band,
            "fraction_outside": diag.fraction_outside,
            "passed": diag.passed,
            "acf": diag.acf,
        },
    }, model


def report_forecast(model, series: LPSeries, steps: int) -> str:
    pred = forecast(model, series, steps)
    header = ["step"] + [f"YS{j}" for j in model.components]
    return to_csv(header, [np.arange(1, steps + 1)] + list(pred.T))


# ---------------------------------------------------------------------------
# bundle runner


@dataclass
class StageResult:
    status: str  # ok | failed | skipped
    files: list = field(default_factory=list)
    error: Optional[str] = None
    error_type: Optional[str] = None


def run_pipeline(config: PipelineConfig, out_dir, sample: Optional[SeriesSample] = None) -> dict:
    """Run every stage, writing one file per report plus ``manifest.json``.

    A failed stage is recorded in the manifest; stages depending on it are
    skipped while independent stages still run.
    """
    config.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stages: dict[str, StageResult] = {}
    ctx: dict = {}

    def write(name: str, content) -> str:
        text = content if isinstance(content, str) else to_json(content)
        (out / name).write_text(text)
        return name

    def run(name, deps, fn):
        blocked = [d for d in deps if stages.get(d) is None or stages[d].status != "ok"]
        if blocked:
            stages[name] = StageResult("skipped", error=f"depends on {', '.join(blocked)}")
            return
        try:
            files = fn() or []
            stages[name] = StageResult("ok", list(files))
        except Exception as exc:
            log.debug("stage %s failed", name, exc_info=True)
            stages[name] = StageResult("failed", error=str(exc), error_type=type(exc).__name__)
            ctx.setdefault("tracebacks", {})[name] = traceback.format_exc()

    def st_load():
        ctx["sample"] = sample if sample is not None else load_series(config.input, config.column, config.returns)
        return []

    def st_transform():
        ctx["series"] = lp_transform(ctx["sample"], config.k)
        return [write("transform.csv", report_transform(ctx["series"]))]

    def st_spectrum():
        text, meta, spec = report_spectrum(ctx["series"], config.max_order, config.spec_grid)
        ctx["flat"] = spec.flat_components
        return [write("spectrum.csv", text), write("spectrum.json", meta)]

    def st_var():
        comps = config.var_components or choose_var_components(ctx["series"], ctx.get("flat"))
        rep, model = report_var(ctx["series"], comps, config.var_max_order)
        files = [write("var.json", rep)]
        if model.stable:
            files.append(write("forecast.csv", report_forecast(model, ctx["series"], config.forecast_steps)))
        return files

    def st_correlogram():
        text, meta = report_correlogram(ctx["series"], config.max_lag)
        return [write("correlogram.csv", text), write("correlogram.json", meta)]

    def st_condquant():
        text, meta, _ = report_condquant(
            ctx["sample"], ctx["series"], config.lag, unit_grid(config.u_grid), config.levels,
            config.n_sim, config.seed,
        )
        files = [write("condquant.csv", text), write("condquant.json", meta)]
        # QIQ of the conditional laws at a few conditioning levels
        _, _, qiq_text = report_condquant(
            ctx["sample"], ctx["series"], config.lag, np.asarray(config.cond_u), config.levels,
            config.n_sim, config.seed, qiq_grid=99,
        )
        files.append(write("condqiq.csv", qiq_text))
        return files

    s = lambda: ctx["series"]  # noqa: E731
    run("load", [], st_load)
    run("transform", ["load"], st_transform)
    run("qiq", ["load"], lambda: [write("qiq.csv", report_qiq(ctx["sample"], 99))])
    run("moments", ["load"], lambda: [write("moments.json", report_moments(ctx["sample"], config.k_moments, config.tail_threshold))])
    run("comoment", ["transform"], lambda: [write("comoment.json", report_comoment(s(), config.lag))])
    run("copula", ["transform"], lambda: [write("copula_grid.csv", report_copula_grid(s(), config.lag, config.grid))])
    run("correlogram", ["transform"], st_correlogram)
    run("autolpinfor", ["transform"], lambda: [write("autolpinfor.csv", report_autolpinfor(s(), config.max_lag, config.granger_lin))])
    run("nonstat", ["transform"], lambda: [write("nonstat.json", report_nonstat(s()))])
    run("quantcorr", ["transform"], lambda: [write("quantcorr.csv", report_quantcorr(s(), config.lag, 99))])
    run("condinfor", ["transform"], lambda: [write("condinfor.csv", report_condinfor(s(), config.lag, 99))])
    run("condquant", ["transform"], st_condquant)
    run("blomqvist", ["transform"], lambda: [write("blomqvist.json", report_blomqvist(s(), config.lag))])
    run("spectrum", ["transform"], st_spectrum)
    run("copspec", ["transform"], lambda: [write("copspec.csv", report_copspec(s(), config.copspec_u, config.copspec_v, config.H, config.spec_grid))])
    run("var", ["transform"], st_var)

    manifest = {
        "version": __version__,
        "numpy": np.__version__,
        "seed": config.seed,
        "config": asdict(config),
        "conventions": CONVENTIONS,
        "stages": {k: asdict(v) for k, v in stages.items()},
        "complete": all(v.status == "ok" for v in stages.values()),
    }
    write("manifest.json", manifest)
    return manifest
