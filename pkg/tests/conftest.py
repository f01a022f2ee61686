"""Shared fixtures and the acceptance summary hook."""

import numpy as np
import pytest

from stemeco.instrument.core import (
    GaussianFeature, Instrument, InstrumentConfig, ScanParameters, SpecimenModel,
)


class SteppingClock:
    """Clock whose sleeps advance a counter instead of blocking."""

    def __init__(self, start: float = 0.0):
        self.t = float(start)
        self.sleeps: list[float] = []

    def now(self) -> float:
        return self.t

    def sleep(self, seconds: float) -> None:
        self.sleeps.append(seconds)
        self.t += seconds


@pytest.fixture
def stepping_clock():
    return SteppingClock()


def quick_config(**overrides) -> InstrumentConfig:
    """Small frames and a tiny settle time so wall-clock tests stay fast."""
    defaults = dict(
        channel_count=2,
        scan_params=ScanParameters(width=16, height=16, dwell_time_us=4.0),
        settle_seconds=0.02,
        buffer_capacity=16,
        rng_seed=42,
        specimen=SpecimenModel(
            features=(GaussianFeature(0.4, 0.5, 1.0, 0.1),),
            noise_sigma=0.01,
        ),
    )
    defaults.update(overrides)
    return InstrumentConfig(**defaults)


@pytest.fixture
def quick_instrument(stepping_clock):
    return Instrument(quick_config(), clock=stepping_clock)


def assert_frames_equal(a, b):
    assert a.channel == b.channel
    assert a.frame_index == b.frame_index
    assert (a.width, a.height) == (b.width, b.height)
    assert np.array_equal(a.pixels, b.pixels)


# -- acceptance criteria reporting --

_acceptance_results: dict[str, str] = {}


def record_criterion(name: str, passed: bool, detail: str = ""):
    _acceptance_results[name] = ("PASS" if passed else "FAIL") + (
        f" — {detail}" if detail else "")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or "test_acceptance" not in str(item.fspath):
        return
    criterion = item.get_closest_marker("criterion")
    if criterion is not None:
        name = criterion.args[0]
        if report.failed:
            _acceptance_results[name] = "FAIL"
        elif report.passed and name not in _acceptance_results:
            _acceptance_results[name] = "PASS"


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): acceptance criterion covered by this test")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(_acceptance_results):
        terminalreporter.write_line(f"{name}: {_acceptance_results[name]}")
