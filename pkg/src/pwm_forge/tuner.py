"""
Sweeps over ``k`` / mean order and a band-energy minimiser over ``k``.
"""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import PwmForgeError
from .laws import K_MAX, Strategy, StrategyConfig, solve_amplitude
from .spectrum import (
    MetricsReport,
    band_energy,
    check_bands,
    default_n_max,
    fourier_from_edges,
    metrics,
)
from .synthesis import synthesize

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
PLATEAU_SPREAD = 0.10
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class SweepRow:
    k: float
    mean_order: float
    A_over_wm: float
    thd: float
    wthd: float
    df: float
    fundamental: float
    band_energies: tuple
    edge_count: int
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: list
    bands: tuple = ()

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True)
class TuneResult:
    k_best: float
    objective: float
    metrics: MetricsReport
    curve: list = field(default_factory=list)
    plateau: bool = False


def _point(template: StrategyConfig, k: float, order: float) -> StrategyConfig:
    return dataclasses.replace(template, strategy=Strategy.HIPWM_FMTC3, k=k, mean_order=order)


def evaluate(config: StrategyConfig, n_max: int | None = None, bands=()):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        wave = synthesize(config)
    return metrics(wave, n_max=n_max, bands=bands)


def sweep(config_template: StrategyConfig, k_values, order_values, n_max: int | None = None,
          bands=()) -> SweepResult:
    """Run synthesis, spectrum and metrics for every ``(mean_order, k)`` pair.

    A failing grid point becomes a row with ``error`` set; the sweep continues.
    """
    bands = tuple((float(lo), float(hi)) for lo, hi in bands)
    rows = []
    for order in sorted(order_values):
        for k in sorted(k_values):
            try:
                A = solve_amplitude(k, order)
                rep = evaluate(_point(config_template, k, order), n_max, bands)
            except (PwmForgeError, ValueError) as exc:
                nan = float("nan")
                rows.append(SweepRow(k, order, nan, nan, nan, nan, nan, (), 0, str(exc)))
                continue
            rows.append(SweepRow(
                k, order, A, rep.thd, rep.wthd, rep.df, rep.fundamental,
                tuple(e for _, _, e in rep.band_energies), rep.edge_count,
            ))
    return SweepResult(rows, bands)


def _objective(config: StrategyConfig, bands, n_max):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        wave = synthesize(config)
    if n_max is None:
        n_max = default_n_max(wave)
    spec = fourier_from_edges(wave, n_max)
    return float(sum(band_energy(spec, bands))) if bands else 0.0


def _better(f_new, k_new, f_old, k_old) -> bool:
    tie = abs(f_new - f_old) <= _TIE_RTOL * max(abs(f_new), abs(f_old), 1e-300)
    if tie:
        return k_new < k_old
    return f_new < f_old


def minimize_band_energy(config_template: StrategyConfig, bands, k_range=(0.0, K_MAX),
                         budget: int = 32, n_max: int | None = None) -> TuneResult:
    """Pick ``k`` minimising the summed energy inside ``bands``.

    Half the budget goes to a uniform coarse grid; the rest refines the best
    grid bracket by golden-section search. Ties go to the smaller ``k``.
    """
    lo, hi = float(k_range[0]), float(k_range[1])
    if not 0.0 <= lo <= hi <= K_MAX:
        raise ValueError(f"k_range must lie inside [0, {K_MAX}]")
    if budget < 8:
        raise ValueError("budget must be >= 8 evaluations")
    bands = check_bands(bands)
    order = config_template.mean_order

    curve = []

    def f(k):
        val = _objective(_point(config_template, k, order), bands, n_max)
        curve.append((k, val))
        return val

    n_coarse = budget // 2
    grid = np.linspace(lo, hi, n_coarse).tolist() if hi > lo else [lo]
    vals = [f(k) for k in grid]
    best_i = 0
    for i in range(1, len(grid)):
        if _better(vals[i], grid[i], vals[best_i], grid[best_i]):
            best_i = i

    spread = max(vals) - min(vals)
    plateau = spread <= PLATEAU_SPREAD * max(abs(max(vals)), 1e-300) or spread == 0.0

    if len(grid) > 1 and not plateau:
        a = grid[max(best_i - 1, 0)]
        b = grid[min(best_i + 1, len(grid) - 1)]
        remaining = budget - len(grid)
        c = b - INV_PHI * (b - a)
        d = a + INV_PHI * (b - a)
        fc, fd = f(c), f(d)
        remaining -= 2
        while remaining > 0:
            if fc <= fd:
                b, d, fd = d, c, fc
                c = b - INV_PHI * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + INV_PHI * (b - a)
                fd = f(d)
            remaining -= 1

    k_best, f_best = curve[0]
    for k, val in curve[1:]:
        if _better(val, k, f_best, k_best):
            k_best, f_best = k, val
    rep = evaluate(_point(config_template, k_best, order), n_max, bands)
    return TuneResult(k_best, f_best, rep, sorted(curve), plateau)
