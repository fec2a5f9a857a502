import math

import numpy as np
import pytest

from mcraqr.mfc import if_assignment, uniform_comb_for
from mcraqr.oracles import ladder_fixture
from mcraqr.waveform import (Carrier, CarrierPlan, CombLine, MfcPlan, amplitude_from_rabi,
                             approx_envelope, approximation_error, band_limit, exact_envelope,
                             field_amplitude, power_from_amplitude, rabi_from_amplitude)


def test_field_amplitude_round_trip():
    assert power_from_amplitude(field_amplitude(1e-3)) == pytest.approx(1e-3)


def test_rabi_round_trip():
    mu = 1275.23 * 8.478e-30
    assert rabi_from_amplitude(amplitude_from_rabi(1e6, mu), mu) == pytest.approx(1e6)


def test_carrier_plan_validation():
    with pytest.raises(ValueError):
        CarrierPlan(())
    with pytest.raises(ValueError):
        CarrierPlan((Carrier(2.0, 1.0), Carrier(1.0, 1.0)))
    with pytest.raises(ValueError):
        MfcPlan((CombLine(1.0), CombLine(1.0)), 1.0)


def test_comb_power_split():
    comb = MfcPlan.uniform(0.0, 10.0, 4, 2.0)
    assert comb.line_power_w == 0.5 and comb.min_spacing() == 10.0


def test_single_tone_envelope_is_constant():
    comb = MfcPlan.from_freqs([30e9], 1.0)
    carriers = CarrierPlan((Carrier(30e9 + 1e6, 0.0),))
    t = np.linspace(0, 1e-6, 50)
    u = exact_envelope(carriers, comb, t)
    assert np.allclose(u, field_amplitude(1.0))


def test_weak_signal_error_scales_with_amplitude_ratio():
    e1 = approximation_error(*_ladder(1e-6)).rel_rms_error
    e2 = approximation_error(*_ladder(1e-4)).rel_rms_error
    assert e1 < 1e-3
    assert e2 / e1 == pytest.approx(100, rel=0.05)   # second-order term ~ P_x / P_y


def _ladder(ratio):
    carriers, comb = ladder_fixture(30e9, 10, 0.5e6, ratio, 0)
    return carriers, comb, if_assignment(carriers, comb)


def test_equal_power_error_is_large():
    with pytest.warns(UserWarning):
        approx_envelope(*_ladder(1.0), np.linspace(0, 1e-6, 10))
    assert 0.35 <= approximation_error(*_ladder(1.0)).rel_rms_error <= 0.65


def test_band_limit_removes_fast_tone():
    t = np.arange(1000) * 1e-9
    x = np.cos(2 * np.pi * 1e6 * t) + np.cos(2 * np.pi * 50e6 * t)
    assert np.allclose(band_limit(x, 1e-9, 10e6), np.cos(2 * np.pi * 1e6 * t), atol=1e-9)


def test_rate_sweep_floor_and_collapse():
    offsets = [1e6, 12e6, 23e6, 35e6, 46e6, 57e6, 69e6, 80e6, 91e6, 103e6]
    carriers = CarrierPlan(tuple(Carrier(30e9 + f, 1e-7, 0.1 * k) for k, f in enumerate(offsets)))

    def err(rate):
        comb = uniform_comb_for(carriers, rate, 1.0, 30e9)
        return approximation_error(carriers, comb, if_assignment(carriers, comb), window=10e-6,
                                   bandwidth_hz=5e6).rel_rms_error

    assert err(3e6) > 1e-2
    assert err(15e6) < 1e-5


def test_window_must_cover_slow_beat():
    with pytest.raises(ValueError):
        approximation_error(*_ladder(1e-6), window=1e-6)
