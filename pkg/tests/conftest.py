import math

import pytest

from mcraqr.optics import DetectorConfig, NoiseConfig, ProbeConfig
from mcraqr.quantum import AtomicSystem

TWO_PI = 2 * math.pi


@pytest.fixture
def large_detuning():
    """Default operating point: far-detuned comb line and auxiliary level."""
    return AtomicSystem.from_hz(10e6, 5.04e6, 7e6, delta_c=0.1e6, delta_a=25e6, delta_x=-25e6)


@pytest.fixture
def small_detuning():
    return AtomicSystem.from_hz(10e6, 5.04e6, 5e6, delta_c=0.1e6, delta_a=0.1e6, delta_x=-0.1e6)


@pytest.fixture
def probe():
    return ProbeConfig.from_power(3.8e-6)


@pytest.fixture
def det():
    return DetectorConfig()


@pytest.fixture
def noise_cfg():
    return NoiseConfig()


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
