"""
Closed-form output voltage and FM sideband prediction.

For a modulator value ``H`` held constant over one carrier cycle the switched
output is a pulse of half-width ``alpha = pi/2 (1 + H)`` centred on each
carrier trough, whose Fourier series in the carrier phase ``theta`` is::

    (E/2)(2 alpha/pi - 1) + (4/pi)(E/2) sum_n (1/n) sin(n alpha) cos(n theta)

Substituting the accumulated phase ``theta(t)`` gives the output voltage.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j_signed
from .errors import OvermodulatedAlpha
from .laws import (
    DEFAULT_INJECTION,
    TWO_PI,
    CarrierLaw,
    CarrierVariant,
    StrategyConfig,
    build_carrier_law,
    injected_modulator,
)
from .synthesis import CLAMP_EPS, _frozen_pieces

_OVERMOD_TOL = 1e-12


@dataclass(frozen=True)
class AnalyticSeries:
    n_terms: int
    law: CarrierLaw
    injection: tuple = DEFAULT_INJECTION
    bus_E: float = 2.0
    amplitude_index: float = 1.0

    def __post_init__(self):
        if self.n_terms < 0:
            raise ValueError("n_terms must be >= 0")

    @classmethod
    def from_config(cls, config: StrategyConfig, n_terms: int = 25) -> "AnalyticSeries":
        return cls(n_terms, build_carrier_law(config), config.injection, config.bus_E,
                   config.amplitude_index)

    def modulator(self, x):
        return injected_modulator(x, self.injection, self.amplitude_index)


def alpha_of(x, injection=DEFAULT_INJECTION, amplitude_index=1.0):
    """Pulse half-width ``pi/2 (1 + H(x))`` for modulator phase ``x``."""
    h = injected_modulator(x, injection, amplitude_index)
    if np.any(np.abs(h) > 1.0 + _OVERMOD_TOL):
        raise OvermodulatedAlpha("|H| > 1: pulse width saturates")
    return 0.5 * math.pi * (1.0 + h)


def quasi_static_coefficient(n: int, alpha, bus_E: float = 2.0):
    """Cosine coefficient of carrier harmonic ``n`` for pulse half-width ``alpha``.

    The sine coefficients vanish identically (the pulse is even in ``theta``).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return (4.0 / (n * math.pi)) * (0.5 * bus_E) * np.sin(n * np.asarray(alpha, dtype=float))


def quasi_static_dc(alpha, bus_E: float = 2.0):
    return 0.5 * bus_E * (2.0 * np.asarray(alpha, dtype=float) / math.pi - 1.0)


def _clamp_map(series: AnalyticSeries):
    """Frozen gaps as (start, end, level or None); None means no clamp applies."""
    out = []
    for pieces, mid in _frozen_pieces(series.law):
        h = float(series.modulator(mid))
        level = None if abs(h) <= CLAMP_EPS else math.copysign(0.5 * series.bus_E, h)
        out.extend((a, b, level) for a, b in pieces)
    return out


def analytic_voltage(t, series: AnalyticSeries):
    """Phase-to-midpoint output voltage from the truncated harmonic series."""
    t = np.asarray(t, dtype=float)
    law = series.law
    x = t * law.omega_m
    h = series.modulator(x)
    theta = law.theta_of_phase(x)
    half = 0.5 * series.bus_E
    v = half * h
    alpha_arg = 0.5 * math.pi * (1.0 + h)
    for n in range(1, series.n_terms + 1):
        v = v + (4.0 / math.pi) * half / n * np.sin(n * alpha_arg) * np.cos(n * theta)

    xr = np.mod(x, TWO_PI)
    for a, b, level in _clamp_map(series):
        if level is None:
            continue
        inside = (xr > a) & (xr < b)
        v = np.where(inside, level, v)
    return v


def _mean_active_modulator(series: AnalyticSeries) -> float:
    total = 0.0
    width = 0.0
    for z in series.law.zones:
        # midpoint rule
        xs = z.start + (z.end - z.start) * (np.arange(2000) + 0.5) / 2000
        total += np.mean(series.modulator(xs)) * (z.end - z.start)
        width += z.end - z.start
    return total / width if width else 0.0


def bessel_sideband_table(series: AnalyticSeries, j_max: int) -> list:
    """Predicted FM sideband lines as ``(n, j, f_hz, magnitude)`` rows.

    The carrier phase is ``a x -/+ z sin(2x)`` with ``a = (A/w_m)(1/2 - k)`` and
    ``z = A/(4 w_m)``, so ``cos(n theta)`` splits into lines at ``|n a -/+ 2j| f_m``
    weighted by ``J_j(n z)``. The envelope uses the average modulator over the
    active zones, which treats the pulse width as constant (an approximation).
    """
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    law = series.law
    f_m = law.omega_m / TWO_PI
    half = 0.5 * series.bus_E
    h_bar = _mean_active_modulator(series)
    if law.fixed:
        a, z, sign = law.A_over_wm, 0.0, 1.0
    else:
        a = law.A_over_wm * (0.5 - law.k)
        z = law.A_over_wm / 4.0
        sign = 1.0 if law.variant is CarrierVariant.LITERAL else -1.0
    rows = []
    for n in range(1, series.n_terms + 1):
        envelope = (4.0 / (n * math.pi)) * half * abs(math.sin(0.5 * n * math.pi * (1.0 + h_bar)))
        orders, weights = bessel_j_signed(j_max, n * z)
        for j, w in zip(orders.tolist(), weights.tolist()):
            f = abs(n * a + sign * 2.0 * j) * f_m
            rows.append((n, j, f, envelope * abs(w)))
    return rows
