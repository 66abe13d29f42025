"""
Command-line front end::

    pwm-forge {solve|synth|spectrum|compare|sweep|avoid} [--config FILE] [--k X]
              [--order N] [--fm HZ] [--bus-e V] [--variant shifted|literal]
              [--nmax N] [--out DIR]

Exit codes: 0 success, 2 configuration error, 3 computation error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import export
from .analytic import AnalyticSeries, bessel_sideband_table
from .errors import ConfigError, PwmForgeError
from .laws import (
    K_MAX,
    Strategy,
    StrategyConfig,
    solve_amplitude,
    zone_boundaries,
)
from .spectrum import carrier_peak_hz, default_n_max, dft_spectrum, fourier_from_edges, metrics
from .synthesis import sample, synthesize
from .tuner import minimize_band_energy, sweep

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE = 0, 2, 3
OUT_ENV = "PWM_FORGE_OUT"

_STRATEGY_KEYS = {f.name for f in dataclasses.fields(StrategyConfig)}
DEFAULT_K_GRID = [round(0.1 * i, 10) for i in range(10)]


@dataclass
class RunConfig:
    strategy: StrategyConfig
    out_dir: Path
    n_max: int | None = None
    sample_rate: float | None = None
    bands: list = field(default_factory=list)
    k_values: list = field(default_factory=lambda: list(DEFAULT_K_GRID))
    order_values: list = field(default_factory=list)
    k_range: tuple = (0.0, K_MAX)
    budget: int = 32
    sideband_j_max: int = 40
    n_terms: int = 25

    def to_dict(self) -> dict:
        d = self.strategy.to_dict()
        d.update(
            out_dir=str(self.out_dir),
            n_max=self.n_max,
            sample_rate=self.sample_rate,
            bands=[list(b) for b in self.bands],
            k_values=list(self.k_values),
            order_values=list(self.order_values),
            k_range=list(self.k_range),
            budget=self.budget,
            sideband_j_max=self.sideband_j_max,
            n_terms=self.n_terms,
        )
        return d


_RUN_KEYS = {f.name for f in dataclasses.fields(RunConfig)} - {"strategy"}


def load_run_config(path, overrides: dict) -> RunConfig:
    """Read a JSON config file, apply CLI overrides and validate everything."""
    raw = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    unknown = set(raw) - _STRATEGY_KEYS - _RUN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    raw.update({k: v for k, v in overrides.items() if v is not None})

    strat = {k: raw[k] for k in _STRATEGY_KEYS if k in raw}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        strategy = StrategyConfig(**strat)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)

    out = raw.get("out_dir") or os.environ.get(OUT_ENV) or "out"
    try:
        run = RunConfig(
            strategy=strategy,
            out_dir=Path(out).expanduser().resolve(),
            n_max=None if raw.get("n_max") is None else int(raw["n_max"]),
            sample_rate=None if raw.get("sample_rate") is None else float(raw["sample_rate"]),
            bands=[(float(lo), float(hi)) for lo, hi in raw.get("bands", [])],
            k_values=[float(k) for k in raw.get("k_values", DEFAULT_K_GRID)],
            order_values=[float(m) for m in raw.get("order_values", [strategy.mean_order])],
            k_range=tuple(float(v) for v in raw.get("k_range", (0.0, K_MAX))),
            budget=int(raw.get("budget", 32)),
            sideband_j_max=int(raw.get("sideband_j_max", 40)),
            n_terms=int(raw.get("n_terms", 25)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config value: {exc}") from None
    if run.n_max is not None and run.n_max < 1:
        raise ConfigError("n_max must be >= 1")
    if len(run.k_range) != 2:
        raise ConfigError("k_range needs two values")
    for lo, hi in run.bands:
        if not lo < hi:
            raise ConfigError(f"band ({lo}, {hi}) needs f_lo < f_hi")
    return run


def _echo_config(run: RunConfig, name: str = "config.json") -> None:
    run.out_dir.mkdir(parents=True, exist_ok=True)
    text = json.dumps(run.to_dict(), indent=2, sort_keys=True) + "\n"
    export.write_text(run.out_dir / name, text)


def cmd_solve(run: RunConfig, out) -> int:
    cfg = run.strategy
    a = solve_amplitude(cfg.k, cfg.mean_order)
    bounds = zone_boundaries(cfg.k, cfg.carrier_variant)
    print(f"A_over_wm = {a:.6f}", file=out)
    print(f"excursion = {a * (1.0 - cfg.k):.6f}", file=out)
    print(f"max_carrier_hz = {a * (1.0 - cfg.k) * cfg.f_m:.6f}", file=out)
    print("zone_boundaries_rad = " + ", ".join(f"{b:.6f}" for b in bounds), file=out)
    return EXIT_OK


def _synth(cfg: StrategyConfig):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        wave = synthesize(cfg)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return wave


def cmd_synth(run: RunConfig, out) -> int:
    _echo_config(run)
    wave = _synth(run.strategy)
    export.write_waveform_csv(run.out_dir / "waveform.csv", wave)
    title = f"{run.strategy.strategy.value} k={run.strategy.k:g} M={run.strategy.mean_order:g}"
    export.write_text(run.out_dir / "waveform.svg", export.waveform_svg(wave, title))
    print(f"edges = {wave.edge_count}", file=out)
    print(f"wrote {run.out_dir / 'waveform.csv'}", file=out)
    return EXIT_OK


def _pipeline(cfg: StrategyConfig, run: RunConfig):
    wave = _synth(cfg)
    n_max = run.n_max or default_n_max(wave)
    spec = fourier_from_edges(wave, n_max)
    rep = metrics(wave, n_max, run.bands, spectrum=spec)
    return wave, spec, rep


def _metric_pairs(cfg, wave, spec, rep):
    pairs = [
        ("strategy", cfg.strategy.value),
        ("k", cfg.k),
        ("mean_order", cfg.mean_order),
        ("n_max", spec.n_max),
        ("fundamental", rep.fundamental),
        ("thd", rep.thd),
        ("wthd", rep.wthd),
        ("df", rep.df),
        ("dc", spec.dc),
        ("edge_count", rep.edge_count),
        ("carrier_peak_hz", carrier_peak_hz(spec)),
    ]
    for i, (lo, hi, e) in enumerate(rep.band_energies):
        pairs.append((f"band_{i}", f"{export.fmt(lo)}..{export.fmt(hi)} Hz: {export.fmt(e)}"))
    return pairs


def _dft_deviation(wave, spec, sample_rate: float) -> float:
    """Largest line deviation between the exact spectrum and the sampled FFT route."""
    spp = sample_rate * wave.period
    if spp < 2 * spec.n_max + 2:
        raise ConfigError("sample_rate too low for the requested n_max")
    samples = sample(wave, sample_rate, method="average")
    oracle = dft_spectrum(samples, spec.f0, sample_rate, spec.n_max, box_average=True)
    return float(np.max(np.hypot(oracle.a - spec.a, oracle.b - spec.b)))


def cmd_spectrum(run: RunConfig, out) -> int:
    _echo_config(run)
    cfg = run.strategy
    wave, spec, rep = _pipeline(cfg, run)
    export.write_spectrum_csv(run.out_dir / "spectrum.csv", spec)
    export.write_text(run.out_dir / "spectrum.svg", export.spectrum_svg(spec))
    pairs = _metric_pairs(cfg, wave, spec, rep)
    if run.sample_rate is not None:
        pairs.append(("dft_max_abs_dev", _dft_deviation(wave, spec, run.sample_rate)))
    text = export.metrics_text(pairs)
    export.write_text(run.out_dir / "metrics.txt", text)
    if cfg.strategy is Strategy.HIPWM_FMTC3:
        series = AnalyticSeries.from_config(cfg, run.n_terms)
        export.write_sideband_csv(run.out_dir / "sidebands.csv",
                                  bessel_sideband_table(series, run.sideband_j_max))
    out.write(text)
    return EXIT_OK


def cmd_compare(run_a: RunConfig, run_b: RunConfig, out) -> int:
    _echo_config(run_a)
    if run_b.out_dir == run_a.out_dir:
        _echo_config(run_b, "config_b.json")
    rows = []
    for label, run in (("a", run_a), ("b", run_b)):
        cfg = run.strategy
        wave, spec, rep = _pipeline(cfg, run)
        rows.append((label, cfg, rep, carrier_peak_hz(spec)))
    thds = [r[2].thd for r in rows]
    if thds[0] == thds[1]:
        lower = "tie"
    else:
        lower = "a" if thds[0] < thds[1] else "b"

    header = "label,strategy,k,mean_order,fundamental,thd,wthd,df,edge_count,carrier_peak_hz,lower_thd"
    lines = [header]
    for label, cfg, rep, peak in rows:
        flag = "yes" if lower in (label, "tie") else "no"
        vals = [label, cfg.strategy.value] + [
            export.fmt(v) for v in (cfg.k, cfg.mean_order, rep.fundamental, rep.thd, rep.wthd,
                                    rep.df, rep.edge_count, peak)
        ] + [flag]
        lines.append(",".join(vals))
    text = "\n".join(lines) + "\n"
    export.write_text(run_a.out_dir / "compare.csv", text)
    out.write(text)
    print(f"lower_thd = {lower}", file=out)
    return EXIT_OK


def cmd_sweep(run: RunConfig, out) -> int:
    _echo_config(run)
    result = sweep(run.strategy, run.k_values, run.order_values, run.n_max, run.bands)
    export.write_sweep_csv(run.out_dir / "sweep.csv", result)
    failed = [r for r in result.rows if r.error]
    for r in failed:
        print(f"warning: k={r.k:g} M={r.mean_order:g}: {r.error}", file=sys.stderr)
    print(f"rows = {len(result)}", file=out)
    return EXIT_OK


def cmd_avoid(run: RunConfig, out) -> int:
    _echo_config(run)
    res = minimize_band_energy(run.strategy, run.bands, run.k_range, run.budget, run.n_max)
    cfg = dataclasses.replace(run.strategy, strategy=Strategy.HIPWM_FMTC3, k=res.k_best)
    wave = _synth(cfg)
    spec = fourier_from_edges(wave, run.n_max or default_n_max(wave))
    threshold = 1e-3 * 0.5 * cfg.bus_E
    worst = 0.0
    for lo, hi in run.bands:
        sel = (spec.frequencies >= lo) & (spec.frequencies <= hi)
        if sel.any():
            worst = max(worst, float(spec.magnitude[sel].max()))
    pairs = [
        ("k_best", res.k_best),
        ("objective", res.objective),
        ("A_over_wm", solve_amplitude(res.k_best, cfg.mean_order)),
        ("thd", res.metrics.thd),
        ("max_line_in_bands", worst),
        ("bands_clear", worst <= threshold),
        ("plateau", res.plateau),
        ("evaluations", len(res.curve)),
    ]
    text = export.metrics_text(pairs)
    curve = "\n".join(f"# k={export.fmt(k)} objective={export.fmt(v)}" for k, v in res.curve)
    export.write_text(run.out_dir / "avoid.txt", text + curve + "\n")
    out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--strategy", choices=[s.value for s in Strategy])
    common.add_argument("--k", type=float)
    common.add_argument("--order", type=float, dest="mean_order")
    common.add_argument("--fm", type=float, dest="f_m")
    common.add_argument("--bus-e", type=float, dest="bus_E")
    common.add_argument("--amplitude-index", type=float, dest="amplitude_index")
    common.add_argument("--variant", choices=["shifted", "literal"], dest="carrier_variant")
    common.add_argument("--nmax", type=int, dest="n_max")
    common.add_argument("--out", dest="out_dir")
    common.add_argument("--band", nargs=2, type=float, action="append", metavar=("LO", "HI"),
                        dest="bands", help="frequency band in Hz (repeatable)")

    parser = argparse.ArgumentParser(prog="pwm-forge", description=__doc__.split("\n")[1].strip())
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="closed-form carrier-law amplitude")
    sub.add_parser("synth", parents=[common], help="edge list CSV and waveform SVG")
    sub.add_parser("spectrum", parents=[common], help="harmonic table, stem plot, metrics")
    p = sub.add_parser("compare", parents=[common], help="metrics of two configs side by side")
    p.add_argument("configs", nargs=2, metavar="CONFIG")
    sub.add_parser("sweep", parents=[common], help="metrics over the k / order grid")
    sub.add_parser("avoid", parents=[common], help="choose k to empty the given bands")
    return parser


_OVERRIDE_KEYS = ("strategy", "k", "mean_order", "f_m", "bus_E", "amplitude_index",
                  "carrier_variant", "n_max", "out_dir", "bands")


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS}
    try:
        if args.command == "compare":
            run_a = load_run_config(args.configs[0], overrides)
            run_b = load_run_config(args.configs[1], overrides)
            return cmd_compare(run_a, run_b, out)
        run = load_run_config(args.config, overrides)
        handler = {
            "solve": cmd_solve,
            "synth": cmd_synth,
            "spectrum": cmd_spectrum,
            "sweep": cmd_sweep,
            "avoid": cmd_avoid,
        }[args.command]
        return handler(run, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PwmForgeError, ArithmeticError, ValueError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
