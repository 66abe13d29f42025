import warnings

import pytest

from pwm_forge import StrategyConfig, synthesize

ACCEPTANCE_LINES = []


def default_config(**kw):
    base = dict(strategy="HIPWM_FMTC3", f_m=50.0, mean_order=15, k=0.5, bus_E=2.0)
    base.update(kw)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return StrategyConfig(**base)


_WAVES = {}


def wave_for(**kw):
    key = tuple(sorted(kw.items()))
    if key not in _WAVES:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _WAVES[key] = synthesize(default_config(**kw))
    return _WAVES[key]


@pytest.fixture(scope="session")
def default_wave():
    return wave_for()


@pytest.fixture(scope="session")
def spwm_wave():
    return wave_for(strategy="SPWM")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
