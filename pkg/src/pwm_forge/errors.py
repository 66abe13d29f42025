"""Exception and warning classes shared across the package."""


class PwmForgeError(Exception):
    """Base class for all package errors."""


class ConfigError(PwmForgeError, ValueError):
    """Invalid strategy or run configuration."""


class ComputationError(PwmForgeError):
    """A numerical stage could not produce a result."""


class UndersampledRate(ComputationError, ValueError):
    pass


class NonintegralPeriods(ComputationError, ValueError):
    pass


class ZeroFundamental(ComputationError, ValueError):
    pass


class OvermodulatedAlpha(ComputationError, ValueError):
    pass


class PwmForgeWarning(UserWarning):
    pass


class OrderWarning(PwmForgeWarning):
    """Average modulation order is not an odd positive multiple of 3."""


class ClippingDetected(PwmForgeWarning):
    """Modulator magnitude exceeds the carrier peak (overmodulation)."""


class FrozenZoneConflict(PwmForgeWarning):
    """Clamp level of a frozen zone disagrees with the comparator at its edge."""
