"""
Exact two-level switched waveforms.

The comparator output is ``+E/2`` where the modulator exceeds the carrier
``triangle(theta - pi/2)`` and ``-E/2`` otherwise. The ``-pi/2`` offset puts
a carrier trough at ``theta = 0``, which is what makes the output pulse of
half-width ``pi/2 (1 + H)`` centred on ``theta = 0`` and gives the waveform
even time symmetry. Edges are bracketed on a dense phase grid and bisected.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ClippingDetected, FrozenZoneConflict, UndersampledRate
from .laws import TWO_PI, CarrierLaw, StrategyConfig, Strategy, build_carrier_law

CARRIER_PHASE_OFFSET = -0.5 * math.pi
GRID_PER_CARRIER_PERIOD = 64
EDGE_TOL = TWO_PI * 1e-13  # in modulator phase; well below T_m * 1e-10
CLAMP_EPS = 1e-9


def triangle(theta):
    """Unit triangle wave of period 2pi: 0 at 0 (rising), 1 at pi/2, -1 at 3pi/2."""
    u = np.mod(np.asarray(theta, dtype=float) + 0.5 * math.pi, TWO_PI)
    return np.where(u < math.pi, -1.0 + u * (2.0 / math.pi), 3.0 - u * (2.0 / math.pi))


def carrier_value(law: CarrierLaw, x):
    """Carrier level at modulator phase ``x``."""
    return triangle(law.theta_of_phase(x) + CARRIER_PHASE_OFFSET)


@dataclass(frozen=True)
class SwitchedWaveform:
    """Piecewise-constant periodic waveform described by its edges.

    ``initial_level`` is the level just before ``t = 0`` (equal to the level
    at the end of the period); ``times[i]`` switches to ``values[i]``.
    """

    period: float
    initial_level: float
    times: np.ndarray
    values: np.ndarray
    levels: tuple
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def edges(self) -> list:
        return list(zip(self.times.tolist(), self.values.tolist()))

    @property
    def edge_count(self) -> int:
        return len(self.times)

    def segments(self):
        """``(starts, ends, levels)`` covering ``[0, period)``; zero-length pieces dropped."""
        starts = np.concatenate(([0.0], self.times))
        ends = np.concatenate((self.times, [self.period]))
        lv = np.concatenate(([self.initial_level], self.values))
        keep = ends > starts
        return starts[keep], ends[keep], lv[keep]

    def level_at(self, t):
        """Level at time ``t`` (periodic; right-continuous at edges)."""
        tr = np.mod(np.asarray(t, dtype=float), self.period)
        idx = np.searchsorted(self.times, tr, side="right")
        lv = np.concatenate(([self.initial_level], self.values))
        return lv[idx]

    def jumps(self):
        """Edge phases ``2pi t / T`` and level steps at each edge."""
        prev = np.concatenate(([self.initial_level], self.values[:-1]))
        return self.times * (TWO_PI / self.period), self.values - prev

    @property
    def max_switching_hz(self):
        """Fastest carrier rate the waveform was built with, if known."""
        law = self.meta.get("law")
        if law is None:
            return None
        return law.peak_order * law.omega_m / TWO_PI + law.omega_m / TWO_PI


def _bisect_edges(pred, lo, hi, s_lo, tol=EDGE_TOL):
    """Vectorised bisection of boolean brackets ``pred(lo) == s_lo != pred(hi)``."""
    lo = lo.copy()
    hi = hi.copy()
    while lo.size and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        same = pred(mid) == s_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _comparator_edges(pred, a, b, dx):
    """State at ``a``, edge phases and new states on ``[a, b]``."""
    n = max(int(math.ceil((b - a) / dx)), 8)
    x = np.linspace(a, b, n + 1)
    state = pred(x)
    idx = np.flatnonzero(state[1:] != state[:-1])
    xs = _bisect_edges(pred, x[idx], x[idx + 1], state[idx])
    return bool(state[0]), xs, state[idx + 1], bool(state[-1])


def _frozen_pieces(law: CarrierLaw):
    """Frozen gaps merged across the ``x = 0`` wrap: list of (pieces, midpoint)."""
    gaps = law.frozen_zones()
    if not gaps:
        return []
    groups = [[g] for g in gaps]
    if len(groups) > 1 and groups[0][0][0] == 0.0 and groups[-1][0][1] == TWO_PI:
        groups[0] = groups.pop() + groups[0]
    out = []
    for pieces in groups:
        if len(pieces) == 2:
            (a, _), (_, b) = pieces
            width = (TWO_PI - a) + b
            mid = math.fmod(a + 0.5 * width, TWO_PI)
        else:
            a, b = pieces[0]
            mid = 0.5 * (a + b)
        out.append((pieces, mid))
    return out


def synthesize(config: StrategyConfig) -> SwitchedWaveform:
    """Build the exact switched waveform for one modulator period.

    Inside active zones the comparator decides the level. Inside frozen zones
    the output is clamped to ``E/2 * sign(H(mid))``; when the modulator is zero
    at the zone midpoint there is no clamp and the comparator against the
    held carrier is used instead (flagged in ``meta['clamp_rule']``).
    """
    law = build_carrier_law(config)
    half = 0.5 * config.bus_E
    dx = TWO_PI / (GRID_PER_CARRIER_PERIOD * max(law.peak_order, 1.0))

    scan = np.linspace(0.0, TWO_PI, 8193)
    if np.max(np.abs(config.modulator(scan))) > 1.0:
        warnings.warn("modulator exceeds the carrier peak", ClippingDetected, stacklevel=2)

    def pred(x):
        return config.modulator(x) > carrier_value(law, x)

    # (start, end, kind, payload) covering [0, 2pi)
    pieces = []
    for z in law.zones:
        pieces.append((z.start, z.end, "active", None))
    clamp_rule = "midpoint_sign"
    for gap_pieces, mid in _frozen_pieces(law):
        h_mid = float(config.modulator(mid))
        if abs(h_mid) > CLAMP_EPS:
            level = h_mid > 0
            for a, b in gap_pieces:
                pieces.append((a, b, "clamp", level))
        else:
            clamp_rule = "held_carrier"
            for a, b in gap_pieces:
                pieces.append((a, b, "active", None))
    pieces.sort(key=lambda p: p[0])

    xs_all, st_all = [], []
    conflicts = []
    state0 = None
    current = None
    for a, b, kind, level in pieces:
        if kind == "clamp":
            if current is not None and level != current:
                conflicts.append(a)
                xs_all.append(a)
                st_all.append(level)
            if state0 is None:
                state0 = level
            current = level
            continue
        s_start, xs, sts, s_end = _comparator_edges(pred, a, b, dx)
        if current is not None and s_start != current:
            conflicts.append(a)
            xs_all.append(a)
            st_all.append(s_start)
        if state0 is None:
            state0 = s_start
        xs_all.extend(xs.tolist())
        st_all.extend(sts.tolist())
        current = s_end

    if conflicts:
        warnings.warn(
            f"frozen-zone clamp disagrees with the comparator at {len(conflicts)} boundary(ies)",
            FrozenZoneConflict,
            stacklevel=2,
        )

    xs_arr = np.asarray(xs_all, dtype=float)
    st_arr = np.asarray(st_all, dtype=bool)
    initial = current
    if current != state0:
        # non-synchronised carrier: the period wraps through a jump at t = 0
        xs_arr = np.concatenate(([0.0], xs_arr))
        st_arr = np.concatenate(([state0], st_arr))

    period = config.period
    meta = {
        "config": config,
        "law": law,
        "clamp_rule": clamp_rule,
        "conflicts": [c * period / TWO_PI for c in conflicts],
    }
    return SwitchedWaveform(
        period=period,
        initial_level=half if initial else -half,
        times=xs_arr * (period / TWO_PI),
        values=np.where(st_arr, half, -half),
        levels=(-half, half),
        meta=meta,
    )


def spwm_reference(config: StrategyConfig) -> SwitchedWaveform:
    """Fixed-carrier sinusoidal PWM at the config's carrier ratio."""
    if config.strategy is not Strategy.SPWM:
        config = StrategyConfig(
            strategy=Strategy.SPWM,
            f_m=config.f_m,
            mean_order=config.mean_order,
            k=0.0,
            bus_E=config.bus_E,
            amplitude_index=config.amplitude_index,
        )
    return synthesize(config)


def _cumulative_area(waveform: SwitchedWaveform, t):
    """Integral of the waveform from 0 to ``t`` for ``t`` in ``[0, n * period]``."""
    starts, ends, lv = waveform.segments()
    period_area = float(np.sum(lv * (ends - starts)))
    n = np.floor(t / waveform.period)
    tr = t - n * waveform.period
    cum = np.concatenate(([0.0], np.cumsum(lv * (ends - starts))))
    idx = np.clip(np.searchsorted(starts, tr, side="right") - 1, 0, len(starts) - 1)
    return n * period_area + cum[idx] + lv[idx] * (tr - starts[idx])


def sample(waveform: SwitchedWaveform, sample_rate: float, n_periods: int = 1, method: str = "hold"):
    """Uniform samples of ``n_periods`` periods.

    ``method="hold"`` takes the instantaneous level at each sample instant
    (zero-order hold). ``method="average"`` returns the mean level over each
    sample interval, i.e. an integrate-and-dump front end.
    """
    fastest = waveform.max_switching_hz
    if fastest is not None and sample_rate < 20.0 * fastest:
        raise UndersampledRate(
            f"sample_rate {sample_rate:g} Hz is below 20x the fastest switching rate ({fastest:g} Hz)"
        )
    n = int(round(sample_rate * waveform.period * n_periods))
    t = np.arange(n) / sample_rate
    if method == "hold":
        return waveform.level_at(t)
    if method == "average":
        edges = np.arange(n + 1) / sample_rate
        return np.diff(_cumulative_area(waveform, edges)) * sample_rate
    raise ValueError(f"unknown sampling method {method!r}")
