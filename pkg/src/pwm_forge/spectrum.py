"""
Harmonic spectra of periodic piecewise-constant waveforms and the usual
distortion figures.

The primary path integrates the waveform exactly over its constant
segments. :func:`dft_spectrum` is an independent FFT route kept as an oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonintegralPeriods, ZeroFundamental
from .laws import TWO_PI
from .synthesis import SwitchedWaveform

MAGNITUDE_FLOOR = 1e-12  # times bus_E
_CHUNK = 4096


@dataclass(frozen=True)
class Spectrum:
    """Cosine/sine coefficients for harmonics ``n = 1 .. n_max`` of ``f0``.

    ``a[n - 1]`` and ``b[n - 1]`` hold harmonic ``n``; ``dc`` is ``a0 / 2``.
    """

    f0: float
    dc: float
    a: np.ndarray
    b: np.ndarray
    full_scale: float | None = None

    @property
    def n_max(self) -> int:
        return len(self.a)

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(1, self.n_max + 1)

    @property
    def frequencies(self) -> np.ndarray:
        return self.harmonics * self.f0

    @property
    def magnitude(self) -> np.ndarray:
        return np.hypot(self.a, self.b)

    def line(self, n: int) -> float:
        return float(self.magnitude[n - 1])

    def truncated(self, n_max: int) -> "Spectrum":
        return Spectrum(self.f0, self.dc, self.a[:n_max], self.b[:n_max], self.full_scale)


@dataclass(frozen=True)
class MetricsReport:
    thd: float
    wthd: float
    df: float
    fundamental: float
    band_energies: list = field(default_factory=list)
    edge_count: int = 0


def default_n_max(waveform: SwitchedWaveform) -> int:
    """Enough harmonics to hold the first two carrier clusters."""
    law = waveform.meta.get("law")
    if law is None:
        return 200
    return int(math.ceil(4.0 * law.peak_order))


def _full_scale(waveform: SwitchedWaveform) -> float:
    return float(max(abs(v) for v in waveform.levels)) * 2.0


def fourier_from_edges(waveform: SwitchedWaveform, n_max: int) -> Spectrum:
    """Exact Fourier coefficients from the edge list.

    Integrating level ``L`` over constant segments and summing by parts gives,
    per edge at phase ``x_j`` with step ``d_j``::

        a_n = -(1 / (n pi)) * sum_j d_j sin(n x_j)
        b_n =  (1 / (n pi)) * sum_j d_j cos(n x_j)
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    starts, ends, lv = waveform.segments()
    dc = float(np.sum(lv * (ends - starts)) / waveform.period)
    x, d = waveform.jumps()
    a = np.empty(n_max)
    b = np.empty(n_max)
    for lo in range(0, n_max, _CHUNK):
        n = np.arange(lo + 1, min(lo + _CHUNK, n_max) + 1, dtype=float)
        arg = np.outer(n, x)
        a[lo : lo + len(n)] = -(np.sin(arg) @ d) / (n * math.pi)
        b[lo : lo + len(n)] = (np.cos(arg) @ d) / (n * math.pi)
    f0 = 1.0 / waveform.period
    return Spectrum(f0, dc, a, b, _full_scale(waveform))


def dft_spectrum(samples, f0: float, sample_rate: float, n_max: int | None = None,
                 box_average: bool = False, full_scale: float | None = None) -> Spectrum:
    """Spectrum of uniformly sampled whole periods via the FFT.

    With ``box_average=True`` the samples are taken to be interval averages
    and each line is divided by the ``sinc`` response of that averaging.
    """
    samples = np.asarray(samples, dtype=float)
    spp = sample_rate / f0
    if abs(spp - round(spp)) > 1e-9 * spp or len(samples) % int(round(spp)):
        raise NonintegralPeriods(
            f"{len(samples)} samples at {spp:g} samples/period do not span whole periods"
        )
    spp = int(round(spp))
    periods = len(samples) // spp
    if n_max is None:
        n_max = spp // 2 - 1
    X = np.fft.rfft(samples) / len(samples)
    idx = periods * np.arange(1, n_max + 1)
    a = 2.0 * X.real[idx]
    b = -2.0 * X.imag[idx]
    if box_average:
        # averaging over [t, t + dt) also advances the phase by half an interval
        n = np.arange(1, n_max + 1)
        h = np.sinc(n / spp) * np.exp(1j * math.pi * n / spp)
        c = (a - 1j * b) / h
        a, b = c.real, -c.imag
    return Spectrum(f0, float(X.real[0]), a, b, full_scale)


def _ratios(spectrum: Spectrum, n_max: int | None, power: int) -> float:
    mags = spectrum.magnitude
    if n_max is not None:
        mags = mags[:n_max]
    scale = spectrum.full_scale if spectrum.full_scale is not None else float(np.max(mags, initial=0.0))
    floor = MAGNITUDE_FLOOR * scale
    m1 = mags[0] if len(mags) else 0.0
    if not m1 > floor:
        raise ZeroFundamental("fundamental magnitude is zero")
    rest = np.where(mags[1:] > floor, mags[1:], 0.0)
    n = np.arange(2, len(mags) + 1, dtype=float)
    return float(math.sqrt(np.sum((rest / n**power) ** 2)) / m1)


def thd(spectrum: Spectrum, n_max: int | None = None) -> float:
    return _ratios(spectrum, n_max, 0)


def wthd(spectrum: Spectrum, n_max: int | None = None) -> float:
    """THD with each harmonic weighted by ``1/n``."""
    return _ratios(spectrum, n_max, 1)


def df(spectrum: Spectrum, n_max: int | None = None) -> float:
    """Distortion factor: harmonics weighted by ``1/n^2``."""
    return _ratios(spectrum, n_max, 2)


def check_bands(bands) -> list:
    bands = [(float(lo), float(hi)) for lo, hi in bands]
    for lo, hi in bands:
        if not lo < hi:
            raise ValueError(f"band ({lo}, {hi}) needs f_lo < f_hi")
    ordered = sorted(bands)
    for (_, hi), (lo, _) in zip(ordered, ordered[1:]):
        if lo < hi:
            raise ValueError("bands overlap")
    return bands


def band_energy(spectrum: Spectrum, bands) -> list:
    """Energy ``sum(m_n^2 / 2)`` of the lines falling inside each band (V^2)."""
    bands = check_bands(bands)
    f = spectrum.frequencies
    e = 0.5 * spectrum.magnitude**2
    return [float(np.sum(e[(f >= lo) & (f <= hi)])) for lo, hi in bands]


def metrics(waveform: SwitchedWaveform, n_max: int | None = None, bands=(),
            spectrum: Spectrum | None = None) -> MetricsReport:
    """Distortion figures; the ratio metrics are NaN when there is no fundamental."""
    if n_max is None:
        n_max = default_n_max(waveform)
    if spectrum is None:
        spectrum = fourier_from_edges(waveform, n_max)
    spectrum = spectrum.truncated(n_max)
    energies = band_energy(spectrum, bands)
    try:
        ratios = thd(spectrum), wthd(spectrum), df(spectrum)
    except ZeroFundamental:
        ratios = (math.nan,) * 3
    return MetricsReport(
        thd=ratios[0],
        wthd=ratios[1],
        df=ratios[2],
        fundamental=spectrum.line(1),
        band_energies=[(lo, hi, e) for (lo, hi), e in zip(check_bands(bands), energies)],
        edge_count=waveform.edge_count,
    )


def _left_limit(waveform: SwitchedWaveform, t: float) -> float:
    """Level just before time ``t`` (periodic)."""
    idx = np.searchsorted(waveform.times, t % waveform.period, side="left")
    lv = np.concatenate(([waveform.initial_level], waveform.values))
    return float(lv[idx])


def line_line(waveform: SwitchedWaveform, phase_shift: float = TWO_PI / 3) -> SwitchedWaveform:
    """Three-level ``V_A(t) - V_A(t - shift)``; ``phase_shift`` is in modulator radians."""
    T = waveform.period
    delay = (phase_shift / TWO_PI) * T
    shifted_t = np.mod(waveform.times + delay, T)
    order = np.argsort(shifted_t, kind="stable")
    other = SwitchedWaveform(
        period=T,
        initial_level=_left_limit(waveform, T - delay),
        times=shifted_t[order],
        values=waveform.values[order],
        levels=waveform.levels,
    )

    before = waveform.initial_level - other.initial_level
    cuts = np.unique(np.concatenate((waveform.times, other.times)))
    mid = 0.5 * (cuts + np.concatenate((cuts[1:], [T])))
    diff = waveform.level_at(mid) - other.level_at(mid)
    keep = diff != np.concatenate(([before], diff[:-1]))
    span = float(waveform.levels[-1] - waveform.levels[0])
    return SwitchedWaveform(
        period=T,
        initial_level=float(before),
        times=cuts[keep],
        values=diff[keep],
        levels=(-span, 0.0, span),
        meta={"phase_shift": phase_shift},
    )


def carrier_peak_hz(spectrum: Spectrum, first: int = 11) -> float:
    """Frequency of the strongest line at or above harmonic ``first``.

    The default skips the modulator band (fundamental plus injected 3rd/9th).
    """
    m = spectrum.magnitude[first - 1 :]
    if m.size == 0:
        return float("nan")
    return float((first + int(np.argmax(m))) * spectrum.f0)
