"""Cross-checks between closed forms and independent numerical references.

Each check returns a :class:`CheckResult` holding the worst observed error
and its tolerance.  The CLI ``oracle-suite`` runs them all.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array import LinearArray
from .comms import CommScenario, User, monte_carlo_snr, mrc_snr
from .constants import TWO_PI
from .mfc import (BandBudget, design_nonuniform, design_uniform, detect_ambiguity, if_assignment,
                  uniform_comb_for)
from .optics import (DetectorConfig, NoiseConfig, ProbeConfig, bcod_output_exact, detector_slope,
                     kappa_closed_form, kappa_gain, noise_powers, operating_point)
from .quantum import AtomicSystem, rho21_closed_form, steady_state_numeric
from .rng import substream
from .sensing import (SensingGrid, Target, crb_closed_form, crb_equal_gain, echo_partials,
                      echo_signal, fim_numeric)
from .waveform import Carrier, CarrierPlan, MfcPlan, approximation_error

RABI_BOX_HZ = (0.1e6, 50e6)
DETUNING_BOX_HZ = 100e6


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)


def random_atomic_system(rng: np.random.Generator, base: AtomicSystem) -> tuple[AtomicSystem, float]:
    """Draw Rabi frequencies and detunings from the validated box; returns (system, omega_z)."""
    lo, hi = RABI_BOX_HZ
    op, oc, oa, oz = rng.uniform(lo, hi, 4)
    dc, da, dx = rng.uniform(-DETUNING_BOX_HZ, DETUNING_BOX_HZ, 3)
    sys = base.with_(omega_p=TWO_PI * op, omega_c=TWO_PI * oc, omega_a=TWO_PI * oa,
                     delta_p=0.0, delta_c=TWO_PI * dc, delta_a=TWO_PI * da, delta_x=TWO_PI * dx)
    return sys, TWO_PI * oz


def _rel(a, b) -> float:
    return float(abs(a - b) / abs(b))


def steady_state_check(base: AtomicSystem, omega_y: float, draws: int, seed: int) -> CheckResult:
    """Closed-form rho_21 against the null-space steady state."""
    worst = _rel(rho21_closed_form(base, omega_y), steady_state_numeric(base, omega_y)[1, 0])
    for k in range(draws):
        sys, oz = random_atomic_system(substream(seed, "oracle/steady-state", k), base)
        worst = max(worst, _rel(rho21_closed_form(sys, oz), steady_state_numeric(sys, oz)[1, 0]))
    return CheckResult("rho21_closed_vs_nullspace", worst, 1e-6)


def slope_check(sys: AtomicSystem, omega_y: float, probe: ProbeConfig,
                det: DetectorConfig) -> CheckResult:
    """Analytic detector slope (length 2L, sign flipped) against a central difference."""
    op = operating_point(sys, omega_y, probe, det)
    h = omega_y * 1e-5
    fd = (bcod_output_exact(omega_y + h, sys, probe, det)
          - bcod_output_exact(omega_y - h, sys, probe, det)) / (2 * h)
    an = -detector_slope(op, probe, det, 2 * sys.cell_length)
    return CheckResult("detector_slope_vs_fd", _rel(an, fd), 1e-6)


def kappa_constant_check(sys: AtomicSystem, omega_y: float, probe: ProbeConfig,
                         det: DetectorConfig, length: float) -> CheckResult:
    """Three-factor gain equals twice the detector-chain gain in magnitude."""
    rg = kappa_gain(sys, omega_y, probe, det, 1, length)
    cf = kappa_closed_form(sys, omega_y, probe, det, 1, length)
    return CheckResult("kappa_closed_form_factor_two", _rel(abs(cf), 2 * abs(rg.kappa)), 1e-9)


def _random_sensing(rng: np.random.Generator):
    n = int(rng.integers(2, 40))
    m = int(rng.integers(2, 40))
    j = int(rng.integers(1, 16))
    grid = SensingGrid(float(rng.uniform(10e9, 40e9)), float(rng.uniform(50e3, 2e6)), n)
    array = LinearArray(m, grid.wavelength / 2 * float(rng.uniform(0.5, 1.0)))
    tgt = Target(float(rng.uniform(-1.3, 1.3)), float(rng.uniform(10, 700)),
                 complex(rng.normal(), rng.normal()))
    kappa = rng.uniform(0.2, 3.0, m) * np.exp(1j * rng.uniform(0, 2 * np.pi, m))
    s = np.exp(2j * np.pi * rng.random(j))
    return grid, array, tgt, kappa, s, float(rng.uniform(0.1, 10.0))


def crb_fim_check(configs: int, seed: int) -> CheckResult:
    """Closed-form CRBs against the inverse of the directly summed FIM."""
    worst = 0.0
    for k in range(configs):
        grid, array, tgt, kappa, s, nv = _random_sensing(substream(seed, "oracle/crb", k))
        inv = np.linalg.inv(fim_numeric(tgt, grid, array, kappa, nv, s.size, s))
        cf = crb_closed_form(tgt, grid, array, kappa, nv, s.size)
        worst = max(worst, _rel(cf.crb_theta, inv[0, 0]), _rel(cf.crb_r, inv[1, 1]))
    return CheckResult("crb_closed_vs_fim_inverse", worst, 1e-6)


def crb_equal_gain_check(configs: int, seed: int) -> CheckResult:
    worst = 0.0
    for k in range(configs):
        grid, array, tgt, _, s, nv = _random_sensing(substream(seed, "oracle/crb-equal", k))
        ka = float(substream(seed, "oracle/crb-equal-gain", k).uniform(0.2, 3.0))
        a = crb_closed_form(tgt, grid, array, ka, nv, s.size)
        b = crb_equal_gain(tgt, grid, array, ka, nv, s.size)
        worst = max(worst, _rel(b.crb_theta, a.crb_theta), _rel(b.crb_r, a.crb_r))
    return CheckResult("crb_equal_gain_reduction", worst, 1e-12)


def _shifted(tgt: Target, attr: str, h: float, f_c: float) -> Target:
    """Target with one parameter moved by h and the complex echo amplitude held fixed."""
    moved = Target(**{**tgt.__dict__, attr: getattr(tgt, attr) + h})
    fix = tgt.echo_amplitude(f_c) / moved.echo_amplitude(f_c)
    return Target(moved.aoa_rad, moved.range_m, moved.reflection * fix)


def partials_check(configs: int, seed: int) -> CheckResult:
    """Analytic echo partials against central finite differences."""
    worst = 0.0
    for k in range(configs):
        grid, array, tgt, kappa, s, _ = _random_sensing(substream(seed, "oracle/partials", k))
        _, dt, dr = echo_partials(tgt, grid, array, kappa, s)
        for attr, an, h in (("aoa_rad", dt, 1e-6), ("range_m", dr, 1e-5)):
            hi, lo = (_shifted(tgt, attr, sgn * h, grid.f_c_hz) for sgn in (1, -1))
            fd = (echo_signal([hi], grid, array, kappa, s)
                  - echo_signal([lo], grid, array, kappa, s)) / (2 * h)
            worst = max(worst, float(np.max(np.abs(an - fd)) / np.max(np.abs(an))))
    return CheckResult("echo_partials_vs_fd", worst, 1e-6)


def snr_check(kappa: float, noise, p_bar_w: float, n_sensors: int, n_symbols: int,
              seed: int, freq_hz: float) -> CheckResult:
    """Closed-form MRC SNR against a symbol-level simulation."""
    array = LinearArray.half_wavelength(n_sensors, freq_hz)
    scn = CommScenario((User(p_bar_w * 1e6, 1e3),), 1.0, (1.0,), (0.5e6,))
    closed = mrc_snr(scn, array, kappa, noise, 0)
    mc = monte_carlo_snr(scn, array, kappa, noise, 0, n_symbols, substream(seed, "oracle/snr", 0))
    return CheckResult("mrc_snr_vs_monte_carlo", _rel(mc, closed), 0.03)


def envelope_check(f_c: float, n: int, delta_hz: float, ratio: float, seed: int) -> CheckResult:
    """Weak-signal envelope approximation error at a small power ratio."""
    carriers, comb = ladder_fixture(f_c, n, delta_hz, ratio, seed)
    err = approximation_error(carriers, comb, if_assignment(carriers, comb)).rel_rms_error
    return CheckResult("envelope_weak_signal", err, 1e-3)


def ladder_fixture(f_c: float, n: int, delta_hz: float, ratio: float, seed: int):
    """One comb line at f_c (1 W) and n carriers at f_c + (i+1) delta sharing ratio W."""
    phases = substream(seed, "envelope/phases", 0).uniform(0, 2 * np.pi, n)
    carriers = CarrierPlan.uniform(f_c + delta_hz, delta_hz, n, ratio / n, phases)
    return carriers, MfcPlan.from_freqs([f_c], 1.0)


COLLISION_OFFSETS_HZ = (8.5e6, 13.5e6, 14.0e6, 22.0e6, 23.5e6, 28.5e6, 31.5e6, 38.5e6, 39.5e6, 40.0e6)


def collision_carriers(f_c: float = 30e9) -> CarrierPlan:
    """Ten irregularly spaced carriers that collide pairwise under a 15 MHz comb."""
    return CarrierPlan(tuple(Carrier(f_c + off, 1e-9) for off in COLLISION_OFFSETS_HZ))


def mfc_checks(budget: BandBudget, f_c: float = 30e9, delta_hz: float = 0.5e6,
               spacing_hz: float = 11e6, n: int = 10) -> list[CheckResult]:
    """Collision fixtures: a single comb with two groups, a two-comb fix, a delta ladder."""
    carriers = collision_carriers(f_c)
    single = if_assignment(carriers, uniform_comb_for(carriers, 15e6, 1.0, f_c))
    groups = detect_ambiguity(single, budget.min_if_separation_hz)
    two = design_uniform(carriers, budget, [15e6, 11.9e6], 1.0, f_c)
    coll = detect_ambiguity(two.if_map, budget.min_if_separation_hz)
    over = float(np.max(np.abs(two.if_map.delta_f_hz)) - budget.if_max_hz)
    ladder = CarrierPlan.uniform(f_c, spacing_hz, n, 1e-9)
    _, nu = design_nonuniform(ladder, budget, delta_hz)
    ladder_err = float(np.max(np.abs(np.abs(nu.delta_f_hz) - (np.arange(n) + 1) * delta_hz)))
    nu_coll = detect_ambiguity(nu, budget.min_if_separation_hz)
    return [
        CheckResult("mfc_single_comb_two_groups", abs(len(groups) - 2), 0),
        CheckResult("mfc_two_comb_collisions", len(coll), 0),
        CheckResult("mfc_two_comb_if_band_excess_hz", max(over, 0.0), 0.0),
        CheckResult("mfc_ladder_if_error_hz", ladder_err, 1e-6),
        CheckResult("mfc_ladder_collisions", len(nu_coll), 0),
    ]
