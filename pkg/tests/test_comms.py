import math

import numpy as np
import pytest

from mcraqr.array import LinearArray
from mcraqr.comms import (CommScenario, ReceiverVariant, RollOff, User, capacity, capacity_curve,
                          channel_vector, monte_carlo_snr, mrc_snr, qam_constellation,
                          three_db_bandwidth)
from mcraqr.optics import NoisePowers
from mcraqr.rng import substream

ARRAY = LinearArray.half_wavelength(22, 30e9)
NOISE = NoisePowers(0.0, 2e-13, 4e-13)


def _scn(distance=1500.0, power=0.01, aoa=0.0):
    return CommScenario((User(6.3e-7, distance, aoa),), power, (1e6,), (0.5e6,))


def test_broadside_channel_has_equal_phases():
    h = channel_vector(_scn(), ARRAY, 0)
    assert np.allclose(h, h[0])
    assert np.allclose(np.abs(h), math.sqrt(6.3e-7) / 1500)


def test_snr_linear_in_sensors_and_kappa():
    g = mrc_snr(_scn(), ARRAY, 3.0, NOISE, 0)
    assert mrc_snr(_scn(), LinearArray.half_wavelength(11, 30e9), 3.0, NOISE, 0) == pytest.approx(g / 2)
    assert mrc_snr(_scn(), ARRAY, 6.0, NOISE, 0) == pytest.approx(4 * g)


def test_snr_drops_6db_when_distance_doubles():
    assert mrc_snr(_scn(3000.0), ARRAY, 3.0, NOISE, 0) == pytest.approx(
        mrc_snr(_scn(), ARRAY, 3.0, NOISE, 0) / 4)


def test_zero_power_gives_zero_snr():
    assert mrc_snr(_scn(power=0.0), ARRAY, 3.0, NOISE, 0) == 0.0


def test_monte_carlo_matches_closed_form():
    scn = _scn(aoa=0.3)
    closed = mrc_snr(scn, ARRAY, 3.0, NOISE, 0)
    mc = monte_carlo_snr(scn, ARRAY, 3.0, NOISE, 0, 100000, substream(0, "test", 0))
    assert mc == pytest.approx(closed, rel=0.03)


def test_capacity_basics():
    assert capacity([1.0], [1.0]) == pytest.approx(1.0)
    assert capacity([2.0] * 5, [3.0] * 5) == pytest.approx(5 * capacity([2.0], [3.0]))


def test_qam_unit_power():
    pts = qam_constellation(64)
    assert pts.size == 64 and np.mean(np.abs(pts) ** 2) == pytest.approx(1.0)


def test_scenario_validation():
    with pytest.raises(ValueError):
        CommScenario((User(1.0, 1.0),), 1.0, (1.0,), (0.5e6,), qam_order=8)
    with pytest.raises(ValueError):
        User(1.0, 0.0)


def test_rolloff_first_order_and_table():
    r = RollOff(2e6)
    assert float(r.factor(2e6)) == pytest.approx(0.5)
    t = RollOff(table_bw_hz=(1e6, 1e7), table_factor=(1.0, 0.1))
    assert float(t.factor(10 ** 6.5)) == pytest.approx(0.55)
    assert t.bandwidth_3db() == pytest.approx(10 ** (6 + 0.5 / 0.9))


def test_three_db_bandwidth_interpolates():
    assert three_db_bandwidth([1.0, 10.0], [1.0, 0.25]) == pytest.approx(10 ** (0.5 / 0.75))
    assert three_db_bandwidth([1.0, 10.0], [1.0, 0.9]) == math.inf


def test_capacity_curve_sublinear_with_rolloff():
    v = ReceiverVariant("x", 400.0, 4e-18, RollOff(1e6))
    c = capacity_curve(v, [1e6, 2e6, 4e6, 8e6], 10, 1e-15, 22)
    assert np.all(np.diff(c) / np.diff([1e6, 2e6, 4e6, 8e6]) < c[0] / 1e6)


def test_capacity_monotone_in_gain():
    a = capacity_curve(ReceiverVariant("a", 1.0, 4e-18), [1e6], 10, 1e-15, 22)
    b = capacity_curve(ReceiverVariant("b", 2.0, 4e-18), [1e6], 10, 1e-15, 22)
    assert b[0] > a[0]
