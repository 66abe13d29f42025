"""Carrier-based PWM synthesis with a truncated frequency-modulated carrier."""

from .errors import (
    ClippingDetected,
    ConfigError,
    FrozenZoneConflict,
    NonintegralPeriods,
    OrderWarning,
    OvermodulatedAlpha,
    PwmForgeError,
    UndersampledRate,
    ZeroFundamental,
)
from .laws import (
    DEFAULT_INJECTION,
    CarrierLaw,
    CarrierVariant,
    Strategy,
    StrategyConfig,
    average_order,
    build_carrier_law,
    carrier_theta,
    injected_modulator,
    instantaneous_pulsation,
    sine_modulator,
    solve_amplitude,
)
from .synthesis import SwitchedWaveform, sample, spwm_reference, synthesize, triangle
from .spectrum import (
    MetricsReport,
    Spectrum,
    band_energy,
    df,
    dft_spectrum,
    fourier_from_edges,
    line_line,
    metrics,
    thd,
    wthd,
)
from .analytic import (
    AnalyticSeries,
    alpha_of,
    analytic_voltage,
    bessel_sideband_table,
    quasi_static_coefficient,
)
from .tuner import SweepResult, TuneResult, minimize_band_energy, sweep

__version__ = "0.1.0"
