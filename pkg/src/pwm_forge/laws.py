"""
Modulator signals and the truncated carrier-frequency law.

All phase quantities use the modulator phase ``x = w_m * t`` (radians) as
the independent variable; time-based entry points convert on the way in.
The carrier pulsation is ``A * max(s(x) - k, 0)`` with ``s = sin^2`` for the
SHIFTED variant and ``s = cos^2`` for the LITERAL one.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, OrderWarning

TWO_PI = 2.0 * math.pi
K_MAX = 0.95
MIN_ORDER = 3.0
DEFAULT_INJECTION = ((1, 1.15), (3, -0.27), (9, -0.029))


class Strategy(str, enum.Enum):
    SPWM = "SPWM"
    HIPWM_FIXED = "HIPWM_FIXED"
    HIPWM_FMTC3 = "HIPWM_FMTC3"


class CarrierVariant(str, enum.Enum):
    SHIFTED = "shifted"
    LITERAL = "literal"


def _parse_enum(cls, value):
    if isinstance(value, cls):
        return value
    text = str(value)
    for member in cls:
        if text.lower() in (member.value.lower(), member.name.lower()):
            return member
    raise ConfigError(f"unknown {cls.__name__} {value!r}")


@dataclass(frozen=True)
class StrategyConfig:
    """One modulation setup.

    ``k = 0`` with ``HIPWM_FMTC3`` is the untruncated HIPWM-FMTC law.
    ``bus_E`` is the DC bus voltage; the output levels are ``+-bus_E/2``.
    """

    strategy: Strategy = Strategy.HIPWM_FMTC3
    f_m: float = 50.0
    mean_order: float = 15.0
    k: float = 0.5
    bus_E: float = 2.0
    injection: tuple = DEFAULT_INJECTION
    carrier_variant: CarrierVariant = CarrierVariant.SHIFTED
    amplitude_index: float = 1.0

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "strategy", _parse_enum(Strategy, self.strategy))
        set_(self, "carrier_variant", _parse_enum(CarrierVariant, self.carrier_variant))
        try:
            injection = tuple((int(h), float(c)) for h, c in self.injection)
            for name in ("f_m", "mean_order", "k", "bus_E", "amplitude_index"):
                set_(self, name, float(getattr(self, name)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config value: {exc}") from None
        set_(self, "injection", injection)

        if not self.f_m > 0:
            raise ConfigError(f"f_m must be positive, got {self.f_m}")
        if not self.bus_E > 0:
            raise ConfigError(f"bus_E must be positive, got {self.bus_E}")
        if not 0.0 <= self.k <= K_MAX:
            raise ConfigError(f"k must lie in [0, {K_MAX}], got {self.k}")
        if not self.mean_order >= MIN_ORDER:
            raise ConfigError(f"mean_order must be >= {MIN_ORDER}, got {self.mean_order}")
        if not 0.0 <= self.amplitude_index <= 1.0:
            raise ConfigError(f"amplitude_index must lie in [0, 1], got {self.amplitude_index}")
        if any(h < 1 for h, _ in injection):
            raise ConfigError("injection harmonic indices must be >= 1")

        if self.strategy is Strategy.SPWM:
            if self.mean_order != round(self.mean_order):
                raise ConfigError("SPWM needs an integer carrier ratio")
        elif not is_odd_multiple_of_three(self.mean_order):
            warnings.warn(
                f"mean_order {self.mean_order:g} is not an odd positive multiple of 3; "
                "three-phase symmetry is lost",
                OrderWarning,
                stacklevel=3,
            )

    @property
    def omega_m(self) -> float:
        return TWO_PI * self.f_m

    @property
    def period(self) -> float:
        return 1.0 / self.f_m

    def modulator(self, x):
        """Modulator value at modulator phase ``x`` (rad)."""
        if self.strategy is Strategy.SPWM:
            return sine_modulator(x, self.amplitude_index)
        return injected_modulator(x, self.injection, self.amplitude_index)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "f_m": self.f_m,
            "mean_order": self.mean_order,
            "k": self.k,
            "bus_E": self.bus_E,
            "injection": [list(p) for p in self.injection],
            "carrier_variant": self.carrier_variant.value,
            "amplitude_index": self.amplitude_index,
        }


def is_odd_multiple_of_three(order: float) -> bool:
    return order == round(order) and int(order) % 3 == 0 and int(order) % 2 == 1


def injected_modulator(x, injection=DEFAULT_INJECTION, amplitude_index=1.0):
    """Sum of cosine harmonics ``amplitude_index * sum(c_h cos(h x))``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for h, c in injection:
        out = out + c * np.cos(h * x)
    return amplitude_index * out


def sine_modulator(x, amplitude_index=1.0):
    # cosine phase, so it lines up with the injected modulator
    return amplitude_index * np.cos(np.asarray(x, dtype=float))


def _lobe_integral(k: float) -> float:
    """Integral of ``cos^2(u) - k`` over ``[0, acos(sqrt(k))]``."""
    beta = math.acos(math.sqrt(k))
    return beta * (0.5 - k) + 0.5 * math.sqrt(k * (1.0 - k))


def _check_k(k: float) -> None:
    if not 0.0 <= k <= K_MAX:
        raise ConfigError(f"k must lie in [0, {K_MAX}], got {k}")


def solve_amplitude(k: float, mean_order: float) -> float:
    """Carrier-law amplitude ``A`` (in units of ``w_m``) giving average order ``mean_order``.

    Each half modulator period holds two half-lobes of the truncated law, so
    ``mean_order = (A / pi) * 2 * lobe`` and ``A = mean_order * pi / (2 * lobe)``.
    """
    _check_k(k)
    if not mean_order > 0:
        raise ConfigError(f"mean_order must be positive, got {mean_order}")
    return mean_order * math.pi / (2.0 * _lobe_integral(k))


def average_order(A: float, k: float) -> float:
    """Inverse of :func:`solve_amplitude`; ``A`` in units of ``w_m``."""
    _check_k(k)
    return 2.0 * A * _lobe_integral(k) / math.pi


def instantaneous_pulsation(x, A, k, variant=CarrierVariant.SHIFTED):
    """Truncated carrier pulsation at modulator phase ``x``.

    Returned in the units of ``A``. Never negative: below the threshold the
    carrier is frozen, not reversed.
    """
    variant = _parse_enum(CarrierVariant, variant)
    x = np.asarray(x, dtype=float)
    s = np.sin(x) ** 2 if variant is CarrierVariant.SHIFTED else np.cos(x) ** 2
    w = A * (s - k)
    # boundary points (s == k up to rounding) belong to the frozen region
    return np.where(w > abs(A) * 1e-12, w, 0.0)


def zone_boundaries(k: float, variant=CarrierVariant.SHIFTED) -> tuple:
    """Sorted boundary phases in ``[0, 2pi)`` separating active and frozen zones."""
    variant = _parse_enum(CarrierVariant, variant)
    if k == 0.0:
        return ()
    if variant is CarrierVariant.SHIFTED:
        b = math.asin(math.sqrt(k))
    else:
        b = math.acos(math.sqrt(k))
    return (b, math.pi - b, math.pi + b, TWO_PI - b)


@dataclass(frozen=True)
class Zone:
    """Active carrier interval ``[start, end]`` in modulator phase."""

    start: float
    end: float
    theta_start: float


@dataclass(frozen=True)
class CarrierLaw:
    """Solved carrier description.

    ``A`` is in rad/s. A ``fixed`` law has constant pulsation ``A`` (SPWM and
    HIPWM_FIXED); otherwise the pulsation is the truncated squared sinusoid.
    """

    A: float
    k: float
    zones: tuple
    variant: CarrierVariant
    omega_m: float
    fixed: bool = False
    period_phase: float = field(init=False)

    def __post_init__(self):
        last = self.zones[-1]
        object.__setattr__(self, "period_phase", float(self.zone_phase(last, last.end)))

    @property
    def A_over_wm(self) -> float:
        return self.A / self.omega_m

    @property
    def mean_order(self) -> float:
        return self.period_phase / TWO_PI

    @property
    def peak_order(self) -> float:
        """Largest instantaneous modulation order, ``A(1-k)/w_m``."""
        if self.fixed:
            return self.A_over_wm
        return self.A_over_wm * (1.0 - self.k)

    def zone_phase(self, zone: Zone, x):
        """Closed-form carrier phase inside ``zone`` at modulator phase ``x``."""
        x = np.asarray(x, dtype=float)
        a = self.A_over_wm
        if self.fixed:
            return zone.theta_start + a * (x - zone.start)
        sign = 1.0 if self.variant is CarrierVariant.LITERAL else -1.0
        return zone.theta_start + a * (
            (0.5 - self.k) * (x - zone.start)
            + sign * 0.25 * (np.sin(2.0 * x) - math.sin(2.0 * zone.start))
        )

    def frozen_zones(self) -> list:
        """Gaps between active zones as ``(start, end)`` pairs over ``[0, 2pi]``.

        A gap that wraps through ``x = 0`` is reported as two pieces.
        """
        gaps = []
        cursor = 0.0
        for z in self.zones:
            if z.start > cursor:
                gaps.append((cursor, z.start))
            cursor = z.end
        if cursor < TWO_PI:
            gaps.append((cursor, TWO_PI))
        return gaps

    def theta_of_phase(self, x):
        """Carrier phase as a function of modulator phase (any real ``x``)."""
        x = np.asarray(x, dtype=float)
        n = np.floor(x / TWO_PI)
        xr = x - n * TWO_PI
        theta = np.full_like(xr, self.zones[0].theta_start)
        for z in self.zones:
            end_phase = self.zone_phase(z, z.end)
            inside = self.zone_phase(z, np.clip(xr, z.start, z.end))
            theta = np.where(xr >= z.end, end_phase, np.where(xr > z.start, inside, theta))
        return n * self.period_phase + theta

    def pulsation(self, x):
        """Instantaneous carrier pulsation (rad/s) at modulator phase ``x``."""
        if self.fixed:
            return np.full_like(np.asarray(x, dtype=float), self.A)
        return instantaneous_pulsation(x, self.A, self.k, self.variant)


def build_carrier_law(config: StrategyConfig) -> CarrierLaw:
    """Solve ``A`` and lay out the active zones with continuous phase offsets.

    Fixed-carrier strategies (SPWM, HIPWM_FIXED) get a constant-pulsation law
    ``A = mean_order * w_m`` over a single zone.
    """
    wm = config.omega_m
    if config.strategy is not Strategy.HIPWM_FMTC3:
        zone = Zone(0.0, TWO_PI, 0.0)
        return CarrierLaw(config.mean_order * wm, 0.0, (zone,), config.carrier_variant, wm, fixed=True)

    k = config.k
    A = solve_amplitude(k, config.mean_order) * wm
    variant = config.carrier_variant
    bounds = zone_boundaries(k, variant)
    if not bounds:
        spans = [(0.0, TWO_PI)]
    elif variant is CarrierVariant.SHIFTED:
        t1, t2, t3, t4 = bounds
        spans = [(t1, t2), (t3, t4)]
    else:
        b = bounds[0]
        spans = [(0.0, b), (math.pi - b, math.pi + b), (TWO_PI - b, TWO_PI)]

    # accumulate offsets so theta is continuous and frozen across gaps
    zones = []
    theta = 0.0
    probe = CarrierLaw(A, k, (Zone(0.0, TWO_PI, 0.0),), variant, wm)
    for start, end in spans:
        z = Zone(start, end, theta)
        zones.append(z)
        theta = float(probe.zone_phase(z, end))
    return CarrierLaw(A, k, tuple(zones), variant, wm)


def carrier_theta(t, law: CarrierLaw, omega_m: float | None = None):
    """Accumulated carrier phase (rad) at time ``t`` (s); ``theta(0) = 0``."""
    wm = law.omega_m if omega_m is None else omega_m
    return law.theta_of_phase(np.asarray(t, dtype=float) * wm)
