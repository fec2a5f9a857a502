"""Probe readout, balanced coherent optical detection, receiver gain and noise."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constants import DEFAULT_CONSTANTS, TWO_PI, PhysicalConstants
from .errors import IfCollision, LinearizationOutOfRange
from .quantum import AtomicSystem, rho21_closed_form, susceptibility, susceptibility_prefactor
from .waveform import IfMap

LN2 = math.log(2.0)
MAX_DEMOD_WINDOW = 10e-3


@dataclass(frozen=True)
class ProbeConfig:
    u_0: float              # input amplitude, V/m
    fwhm: float = 1.7e-3    # beam FWHM, m
    phi_0: float = 0.0
    lambda_p: float = 852.347e-9

    def __post_init__(self):
        if self.u_0 <= 0 or self.fwhm <= 0:
            raise ValueError("probe amplitude and FWHM must be positive")

    @property
    def f_p(self) -> float:
        return DEFAULT_CONSTANTS.c / self.lambda_p

    @classmethod
    def from_power(cls, power_w: float, fwhm: float = 1.7e-3, phi_0: float = 0.0,
                   lambda_p: float = 852.347e-9, consts: PhysicalConstants = DEFAULT_CONSTANTS):
        """Amplitude of a Gaussian beam carrying ``power_w`` (inverse of the baseband map)."""
        u0 = math.sqrt(8 * LN2 * power_w / (math.pi * consts.c * consts.epsilon_0)) / fwhm
        return cls(u0, fwhm, phi_0, lambda_p)


@dataclass(frozen=True)
class DetectorConfig:
    local_power_w: float = 1e-3
    local_phase_rad: float = 0.0
    lna_gain: float = 1000.0

    def __post_init__(self):
        if self.local_power_w <= 0:
            raise ValueError("local oscillator power must be positive")
        if self.lna_gain < 1:
            raise ValueError("LNA gain must be >= 1")


@dataclass(frozen=True)
class NoiseConfig:
    temperature_k: float = 300.0
    gamma_nat: float = 0.0
    gamma_bbr: float = 0.0
    upsilon_1: float = 1.0
    upsilon_2: float = 1.0
    qpn_enabled: bool = False

    def __post_init__(self):
        for name in ("temperature_k", "gamma_nat", "gamma_bbr", "upsilon_1", "upsilon_2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def responsivity(probe: ProbeConfig, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Photodiode responsivity eta*q/(hbar*omega_p), A/W."""
    return consts.eta * consts.q / (consts.hbar * TWO_PI * probe.f_p)


def probe_amplitude_phase(chi, probe: ProbeConfig, cell_length: float):
    """Output probe amplitude and phase after a cell of length ``cell_length``."""
    kl = TWO_PI / probe.lambda_p * cell_length
    chi = np.asarray(chi)
    return probe.u_0 * np.exp(-kl * chi.imag), probe.phi_0 + kl * chi.real


def probe_baseband(u_p, phi_p, probe: ProbeConfig, consts: PhysicalConstants = DEFAULT_CONSTANTS):
    """Baseband probe sqrt(P) e^{j phi}; |P_b|^2 is the probe power in W."""
    if np.any(np.asarray(u_p) < 0):
        raise ValueError("probe amplitude must be non-negative")
    scale = math.sqrt(math.pi * consts.c * consts.epsilon_0 / (8 * LN2)) * probe.fwhm
    return scale * np.abs(u_p) * np.exp(1j * np.asarray(phi_p))


def probe_power(u_p, probe: ProbeConfig, consts: PhysicalConstants = DEFAULT_CONSTANTS):
    return np.abs(probe_baseband(u_p, 0.0, probe, consts)) ** 2


def _chi(sys: AtomicSystem, omega_z):
    return susceptibility_prefactor(sys) * rho21_closed_form(sys, omega_z)


def bcod_output_from_chi(chi, cell_length: float, probe: ProbeConfig, det: DetectorConfig,
                         consts: PhysicalConstants = DEFAULT_CONSTANTS):
    """Balanced detector output for a given susceptibility (vectorized)."""
    u_p, phi_p = probe_amplitude_phase(chi, probe, cell_length)
    p = probe_power(u_p, probe, consts)
    alpha = responsivity(probe, consts)
    return 2 * math.sqrt(det.lna_gain) * alpha * np.sqrt(det.local_power_w * p) * np.cos(
        det.local_phase_rad - phi_p)


def bcod_output_exact(omega_z, sys: AtomicSystem, probe: ProbeConfig, det: DetectorConfig,
                      consts: PhysicalConstants = DEFAULT_CONSTANTS):
    """Balanced detector output through the full nonlinear chain (vectorized in omega_z)."""
    return bcod_output_from_chi(_chi(sys, omega_z), sys.cell_length, probe, det, consts)


@dataclass(frozen=True)
class OperatingPoint:
    """Linearization quantities at omega_z = omega_y."""

    omega_y: float
    chi: complex
    chi_prime: complex
    a_tilde: float          # |chi'|
    psi: float              # phase of chi' measured from its imaginary axis
    phi_p: float
    probe_power_w: float
    dc: float               # detector output at omega_y


def operating_point(sys: AtomicSystem, omega_y: float, probe: ProbeConfig, det: DetectorConfig,
                    consts: PhysicalConstants = DEFAULT_CONSTANTS) -> OperatingPoint:
    sp = susceptibility(sys, omega_y)
    u_p, phi_p = probe_amplitude_phase(sp.chi, probe, sys.cell_length)
    p = float(probe_power(u_p, probe, consts))
    a_tilde = abs(sp.chi_prime)
    # arccos(Im/|chi'|) extended to the full circle
    psi = math.atan2(sp.chi_prime.real, sp.chi_prime.imag)
    dc = float(bcod_output_exact(omega_y, sys, probe, det, consts))
    return OperatingPoint(omega_y, sp.chi, sp.chi_prime, a_tilde, psi, float(phi_p), p, dc)


def effective_length(spacing: float, cell_length: float, mode: str = "spacing") -> float:
    """Length entering the AC gain: the sensor spacing, or 2L which matches the exact slope."""
    if mode == "spacing":
        return spacing
    if mode == "cell":
        return 2.0 * cell_length
    raise ValueError(f"unknown gain length mode {mode!r}")


def ac_coefficient(op: OperatingPoint, sys: AtomicSystem, probe: ProbeConfig, det: DetectorConfig,
                   comb_b: int, length: float) -> float:
    """Dimensionless A_m = A~ pi d mu45 / (lambda_p sqrt(B) hbar) cos(phi_l - phi_p + psi)."""
    return (op.a_tilde * math.pi * length * sys.mu_45 / (probe.lambda_p * math.sqrt(comb_b)
                                                          * DEFAULT_CONSTANTS.hbar)
            * math.cos(det.local_phase_rad - op.phi_p + op.psi))


def detector_slope(op: OperatingPoint, probe: ProbeConfig, det: DetectorConfig, length: float,
                   consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Linear coefficient of the detector output in (omega_z - omega_y), A*s/rad.

    Sign as in the DC+AC decomposition; the true derivative is its negative
    when ``length`` is twice the cell length.
    """
    alpha = responsivity(probe, consts)
    return (2 * math.sqrt(det.lna_gain) * alpha * math.sqrt(det.local_power_w * op.probe_power_w)
            * op.a_tilde * math.pi * length / probe.lambda_p
            * math.cos(det.local_phase_rad - op.phi_p + op.psi))


def bcod_output_linearized(omega_z_t, sys: AtomicSystem, omega_y: float, probe: ProbeConfig,
                           det: DetectorConfig, length: float, taylor: bool = False,
                           consts: PhysicalConstants = DEFAULT_CONSTANTS):
    """DC plus AC detector output for a sampled omega_z envelope.

    With ``taylor=False`` the AC term uses the DC+AC decomposition as stated,
    with gain length ``length``.  ``taylor=True`` uses the exact first
    derivative of the detector output (sign and length 2L), i.e. a true
    first-order expansion.
    """
    oz = np.asarray(omega_z_t, dtype=float)
    dev = np.max(np.abs(oz - omega_y)) if oz.size else 0.0
    if dev > 0.5 * omega_y:
        raise LinearizationOutOfRange(
            f"envelope deviates by {dev / omega_y:.2f} of omega_y (limit 0.5)")
    if dev > 0.1 * omega_y:
        warnings.warn("envelope deviation exceeds 10% of omega_y; linear model is rough",
                      stacklevel=2)
    op = operating_point(sys, omega_y, probe, det, consts)
    if taylor:
        slope = -detector_slope(op, probe, det, 2 * sys.cell_length, consts)
    else:
        slope = detector_slope(op, probe, det, length, consts)
    return op.dc + slope * (oz - omega_y)


@dataclass(frozen=True)
class ReceiverGain:
    rho: float
    kappa: complex
    a_m: float
    op: OperatingPoint


def kappa_gain(sys: AtomicSystem, omega_y: float, probe: ProbeConfig, det: DetectorConfig,
               comb_b: int, length: float, mfc_phase: float = 0.0,
               consts: PhysicalConstants = DEFAULT_CONSTANTS) -> ReceiverGain:
    """Receiver gain rho_m = 2 alpha sqrt(2 G P_l P/(A_e c eps0)) A_m, kappa = rho e^{-j phi_m}.

    Maps sqrt(W) of incident carrier power to detector amplitude (A).
    """
    op = operating_point(sys, omega_y, probe, det, consts)
    a_m = ac_coefficient(op, sys, probe, det, comb_b, length)
    alpha = responsivity(probe, consts)
    rho = 2 * alpha * math.sqrt(2 * det.lna_gain * det.local_power_w * op.probe_power_w
                                / (consts.a_e * consts.c * consts.epsilon_0)) * a_m
    return ReceiverGain(rho, rho * complex(math.cos(mfc_phase), -math.sin(mfc_phase)), a_m, op)


def kappa_closed_form(sys: AtomicSystem, omega_y: float, probe: ProbeConfig, det: DetectorConfig,
                      comb_b: int, length: float, mfc_phase: float = 0.0,
                      consts: PhysicalConstants = DEFAULT_CONSTANTS) -> complex:
    """Three-factor closed form of the gain (constant x optics x atomic response).

    Its constant factor is twice the one implied by ``kappa_gain``; see the
    tests for the exact relation.
    """
    op = operating_point(sys, omega_y, probe, det, consts)
    const = consts.eta * consts.q * math.sqrt(math.pi) / (consts.hbar ** 2 * consts.c * math.sqrt(LN2))
    optics = probe.fwhm * length * sys.mu_45 * abs(probe.u_0) * math.sqrt(
        det.lna_gain * det.local_power_w / consts.a_e)
    kl = TWO_PI / probe.lambda_p * sys.cell_length
    atomic = (np.exp(-(1j * mfc_phase + kl * op.chi.imag)) / math.sqrt(comb_b) * op.a_tilde
              * math.cos(det.local_phase_rad - op.phi_p + op.psi))
    return complex(const * optics * atomic)


@dataclass(frozen=True)
class NoisePowers:
    qpn: float
    psn: float
    itn: float

    @property
    def total(self) -> float:
        """Per-component baseband noise variance (half the summed powers)."""
        return 0.5 * (self.qpn + self.psn + self.itn)


def noise_powers(cfg: NoiseConfig, det: DetectorConfig, bandwidth_hz: float, probe_power_w: float,
                 rho_m: float, sys: AtomicSystem, probe: ProbeConfig,
                 consts: PhysicalConstants = DEFAULT_CONSTANTS) -> NoisePowers:
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    qpn = 0.0
    if cfg.qpn_enabled:
        qpn = (rho_m ** 2 * bandwidth_hz * consts.hbar ** 2 * (cfg.gamma_nat + cfg.gamma_bbr)
               / (sys.mu_45 ** 2 * sys.n_atoms * cfg.upsilon_1 * cfg.upsilon_2))
    alpha = responsivity(probe, consts)
    psn = 2 * consts.q * bandwidth_hz * alpha * det.lna_gain * (det.local_power_w + probe_power_w)
    itn = consts.k_B * cfg.temperature_k * bandwidth_hz * det.lna_gain
    return NoisePowers(qpn, psn, itn)


# --------------------------------------------------------------------------
# demodulation


def demod_window(if_map: IfMap, resolution_hz: float = 1e-3) -> float:
    """Shortest window holding an integer number of periods of every IF (capped at 10 ms)."""
    fr = [Fraction(abs(float(f))).limit_denominator(int(round(1 / resolution_hz)))
          for f in if_map.delta_f_hz if f != 0]
    if not fr:
        raise IfCollision("all carriers sit at zero IF")
    g = fr[0]
    for f in fr[1:]:
        g = Fraction(math.gcd(g.numerator * f.denominator, f.numerator * g.denominator),
                     g.denominator * f.denominator)
    window = float(1 / g)
    if window > MAX_DEMOD_WINDOW:
        warnings.warn("IF set has no common period below 10 ms; orthogonality is approximate",
                      stacklevel=2)
        window = MAX_DEMOD_WINDOW
    return window


def extract_ac(v, t, if_map: IfMap, dc: float = 0.0) -> np.ndarray:
    """Per-carrier complex amplitude of the AC detector output.

    Removes ``dc`` and correlates with exp(-j 2 pi df_i t) over the sampled
    window; for a window holding whole periods of every IF the carriers are
    exactly orthogonal.  Returns rho sqrt(P_x,i) e^{j dphi_i} per carrier.
    """
    v = np.asarray(v, dtype=float) - dc
    t = np.asarray(t, dtype=float)
    window = t[-1] - t[0] + (t[1] - t[0])
    res = 1.0 / window
    mag = np.abs(if_map.delta_f_hz)
    if np.any(mag < res):
        raise IfCollision("a carrier IF is within the window resolution of DC")
    order = np.sort(mag)
    if np.any(np.diff(order) < res):
        raise IfCollision("two carriers share an IF within the window resolution")
    ph = np.exp(-2j * np.pi * np.outer(if_map.delta_f_hz, t))
    return 2.0 * (ph @ v) / v.size
