import math
import warnings

import numpy as np
import pytest

from mcraqr.errors import IfCollision, LinearizationOutOfRange
from mcraqr.optics import (DetectorConfig, NoiseConfig, ProbeConfig, bcod_output_exact,
                           bcod_output_linearized, demod_window, detector_slope, effective_length,
                           extract_ac, kappa_closed_form, kappa_gain, noise_powers,
                           operating_point, probe_amplitude_phase, probe_power, responsivity)
from mcraqr.waveform import IfMap

TWO_PI = 2 * math.pi
OY = TWO_PI * 5e6


def test_from_power_round_trip(probe):
    assert float(probe_power(probe.u_0, probe)) == pytest.approx(3.8e-6, rel=1e-12)


def test_responsivity_value(probe):
    # q / (h f) at 852 nm is about 0.687 A/W
    assert responsivity(probe) == pytest.approx(0.6874, rel=1e-3)


def test_transparent_medium_keeps_probe(probe):
    u, phi = probe_amplitude_phase(0.0, probe, 0.1)
    assert float(u) == probe.u_0 and float(phi) == probe.phi_0


def test_absorbing_medium_attenuates(probe):
    u, _ = probe_amplitude_phase(1e-6j, probe, 0.1)
    assert float(u) < probe.u_0


def test_detector_slope_matches_derivative(large_detuning, probe, det):
    op = operating_point(large_detuning, OY, probe, det)
    h = OY * 1e-5
    fd = (bcod_output_exact(OY + h, large_detuning, probe, det)
          - bcod_output_exact(OY - h, large_detuning, probe, det)) / (2 * h)
    an = -detector_slope(op, probe, det, 2 * large_detuning.cell_length)
    assert an == pytest.approx(float(fd), rel=1e-6)


def test_linearized_output_tracks_exact_for_small_deviation(large_detuning, probe, det):
    oz = OY * (1 + 1e-4 * np.sin(np.linspace(0, 6, 50)))
    lin = bcod_output_linearized(oz, large_detuning, OY, probe, det, 0.2, taylor=True)
    ex = bcod_output_exact(oz, large_detuning, probe, det)
    assert np.max(np.abs(lin - ex)) < 1e-3 * np.max(np.abs(ex - ex.mean()))


def test_linearization_range_enforced(large_detuning, probe, det):
    with pytest.raises(LinearizationOutOfRange):
        bcod_output_linearized([OY * 1.6], large_detuning, OY, probe, det, 0.2)
    with pytest.warns(UserWarning):
        bcod_output_linearized([OY * 1.2], large_detuning, OY, probe, det, 0.2)


def test_effective_length_modes():
    assert effective_length(5e-3, 0.1, "spacing") == 5e-3
    assert effective_length(5e-3, 0.1, "cell") == pytest.approx(0.2)
    with pytest.raises(ValueError):
        effective_length(5e-3, 0.1, "other")


def test_kappa_scales_with_comb_lines(large_detuning, probe, det):
    k1 = kappa_gain(large_detuning, OY, probe, det, 1, 0.2).rho
    k4 = kappa_gain(large_detuning, OY, probe, det, 4, 0.2).rho
    assert k4 == pytest.approx(k1 / 2, rel=1e-12)


def test_kappa_phase_follows_comb_phase(large_detuning, probe, det):
    g = kappa_gain(large_detuning, OY, probe, det, 1, 0.2, mfc_phase=0.3)
    assert np.angle(g.kappa) == pytest.approx(-0.3 if g.rho > 0 else math.pi - 0.3)


def test_closed_form_is_twice_chain_gain(large_detuning, probe, det):
    g = kappa_gain(large_detuning, OY, probe, det, 3, 0.2)
    cf = kappa_closed_form(large_detuning, OY, probe, det, 3, 0.2)
    assert abs(cf) == pytest.approx(2 * abs(g.kappa), rel=1e-9)


def test_noise_components(large_detuning, probe, det):
    op = operating_point(large_detuning, OY, probe, det)
    n1 = noise_powers(NoiseConfig(), det, 1e6, op.probe_power_w, 1.0, large_detuning, probe)
    n2 = noise_powers(NoiseConfig(), det, 2e6, op.probe_power_w, 1.0, large_detuning, probe)
    assert n1.qpn == 0.0
    assert n2.psn == pytest.approx(2 * n1.psn) and n2.itn == pytest.approx(2 * n1.itn)
    assert n1.total == pytest.approx(0.5 * (n1.psn + n1.itn))
    # k_B T B G
    assert n1.itn == pytest.approx(1.380649e-23 * 300 * 1e6 * 1000)


def test_qpn_enabled_adds_noise(large_detuning, probe, det):
    cfg = NoiseConfig(gamma_nat=TWO_PI * 1e3, qpn_enabled=True)
    n = noise_powers(cfg, det, 1e6, 1e-6, 10.0, large_detuning, probe)
    assert n.qpn > 0


def test_noise_rejects_zero_bandwidth(large_detuning, probe, det):
    with pytest.raises(ValueError):
        noise_powers(NoiseConfig(), det, 0.0, 1e-6, 1.0, large_detuning, probe)


def test_demod_window_is_common_period():
    m = IfMap(np.arange(3), np.array([0.5e6, 1.0e6, 1.5e6]), np.zeros(3))
    assert demod_window(m) == pytest.approx(2e-6)


def test_extract_ac_recovers_amplitudes():
    m = IfMap(np.arange(3), np.array([0.5e6, 1.0e6, -1.5e6]), np.zeros(3))
    w = demod_window(m)
    t = np.arange(400) * (w / 400)
    amps = np.array([1.0 + 0.5j, -0.3j, 2.0])
    v = 7.0 + sum(np.real(a * np.exp(2j * np.pi * f * t)) for a, f in zip(amps, m.delta_f_hz))
    assert np.allclose(extract_ac(v, t, m, dc=7.0), amps, atol=1e-12)


def test_extract_ac_detects_collision():
    m = IfMap(np.arange(2), np.array([0.5e6, -0.5e6]), np.zeros(2))
    t = np.arange(100) * 1e-8
    with pytest.raises(IfCollision):
        extract_ac(np.zeros(100), t, m)


def test_config_validation():
    with pytest.raises(ValueError):
        ProbeConfig(0.0)
    with pytest.raises(ValueError):
        DetectorConfig(local_power_w=0.0)
    with pytest.raises(ValueError):
        NoiseConfig(temperature_k=-1.0)
