"""Multi-carrier RF and comb waveforms, the superposed envelope and its linear model."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import DEFAULT_CONSTANTS, PhysicalConstants, hbar

# sum(P_x)/P_y above this triggers a weak-signal warning
WEAK_SIGNAL_RATIO = 1e-2


@dataclass(frozen=True)
class Carrier:
    freq_hz: float
    power_w: float
    phase_rad: float = 0.0


@dataclass(frozen=True)
class CarrierPlan:
    carriers: tuple[Carrier, ...]

    def __post_init__(self):
        object.__setattr__(self, "carriers", tuple(self.carriers))
        if not self.carriers:
            raise ValueError("carrier plan is empty")
        f = self.freqs
        if np.any(np.diff(f) <= 0):
            raise ValueError("carrier frequencies must be strictly increasing")
        if np.any(self.powers < 0):
            raise ValueError("carrier powers must be non-negative")

    @classmethod
    def uniform(cls, f_c: float, delta_f: float, n: int, power_w: float | np.ndarray,
                phases=None, start: int = 0) -> "CarrierPlan":
        """Carriers at f_c + i*delta_f for i = start .. start+n-1."""
        p = np.broadcast_to(np.asarray(power_w, dtype=float), (n,))
        ph = np.zeros(n) if phases is None else np.broadcast_to(np.asarray(phases, float), (n,))
        return cls(tuple(Carrier(f_c + (start + i) * delta_f, float(p[i]), float(ph[i]))
                         for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.carriers)

    @property
    def freqs(self) -> np.ndarray:
        return np.array([c.freq_hz for c in self.carriers])

    @property
    def powers(self) -> np.ndarray:
        return np.array([c.power_w for c in self.carriers])

    @property
    def phases(self) -> np.ndarray:
        return np.array([c.phase_rad for c in self.carriers])

    def scaled(self, factor: float) -> "CarrierPlan":
        return CarrierPlan(tuple(Carrier(c.freq_hz, c.power_w * factor, c.phase_rad)
                                 for c in self.carriers))


@dataclass(frozen=True)
class CombLine:
    freq_hz: float
    phase_rad: float = 0.0


@dataclass(frozen=True)
class MfcPlan:
    """Comb lines sharing ``total_power_w`` equally."""

    lines: tuple[CombLine, ...]
    total_power_w: float

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(sorted(self.lines, key=lambda l: l.freq_hz)))
        if not self.lines:
            raise ValueError("comb has no lines")
        if len({l.freq_hz for l in self.lines}) != len(self.lines):
            raise ValueError("comb line frequencies must be distinct")
        if self.total_power_w < 0:
            raise ValueError("comb power must be non-negative")

    @classmethod
    def uniform(cls, f_start: float, rate: float, b: int, total_power_w: float) -> "MfcPlan":
        return cls(tuple(CombLine(f_start + j * rate) for j in range(b)), total_power_w)

    @classmethod
    def from_freqs(cls, freqs, total_power_w: float, phases=None) -> "MfcPlan":
        freqs = np.asarray(freqs, dtype=float)
        ph = np.zeros(freqs.size) if phases is None else np.asarray(phases, float)
        return cls(tuple(CombLine(float(f), float(p)) for f, p in zip(freqs, ph)), total_power_w)

    @property
    def b(self) -> int:
        return len(self.lines)

    @property
    def freqs(self) -> np.ndarray:
        return np.array([l.freq_hz for l in self.lines])

    @property
    def phases(self) -> np.ndarray:
        return np.array([l.phase_rad for l in self.lines])

    @property
    def line_power_w(self) -> float:
        return self.total_power_w / self.b

    def min_spacing(self) -> float:
        return float(np.min(np.diff(self.freqs))) if self.b > 1 else math.inf


@dataclass(frozen=True)
class IfMap:
    """Per-carrier nearest comb line and the resulting IF frequency and phase."""

    line_index: np.ndarray
    delta_f_hz: np.ndarray
    delta_phi_rad: np.ndarray
    comb_index: np.ndarray = field(default=None)  # which comb, for multi-comb designs

    def __post_init__(self):
        for name in ("line_index", "delta_f_hz", "delta_phi_rad"):
            object.__setattr__(self, name, np.asarray(getattr(self, name)))
        if self.comb_index is None:
            object.__setattr__(self, "comb_index", np.zeros(self.line_index.size, dtype=int))

    @property
    def n(self) -> int:
        return self.delta_f_hz.size


def field_amplitude(power_w, consts: PhysicalConstants = DEFAULT_CONSTANTS):
    """Field amplitude U = sqrt(2P/(A_e c eps0)) in V/m."""
    return np.sqrt(2.0 * np.asarray(power_w, dtype=float) / (consts.a_e * consts.c * consts.epsilon_0))


def power_from_amplitude(u, consts: PhysicalConstants = DEFAULT_CONSTANTS):
    return np.asarray(u, dtype=float) ** 2 * consts.a_e * consts.c * consts.epsilon_0 / 2.0


def rabi_from_amplitude(u, mu_45: float):
    """Rabi frequency (rad/s) of a field of amplitude ``u`` (V/m)."""
    if np.any(np.asarray(u) < 0):
        raise ValueError("amplitude must be non-negative")
    return mu_45 * u / hbar


def amplitude_from_rabi(omega, mu_45: float):
    return hbar * omega / mu_45


def _check_weak(carriers: CarrierPlan, comb: MfcPlan):
    if comb.total_power_w > 0 and carriers.powers.sum() / comb.total_power_w > WEAK_SIGNAL_RATIO:
        warnings.warn("carrier power is not small compared with the comb power; "
                      "the linear envelope model is inaccurate", stacklevel=3)


def exact_envelope(carriers: CarrierPlan, comb: MfcPlan, t, consts: PhysicalConstants = DEFAULT_CONSTANTS):
    """Magnitude of the full complex superposition of carriers and comb lines (V/m).

    Works at complex baseband relative to the lowest tone so that large
    absolute frequencies do not cost phase precision.
    """
    t = np.asarray(t, dtype=float)
    f_ref = min(carriers.freqs.min(), comb.freqs.min())
    s = np.zeros(t.shape, dtype=complex)
    for f, p, th in zip(carriers.freqs, carriers.powers, carriers.phases):
        s += math.sqrt(p) * np.exp(1j * (2 * np.pi * (f - f_ref) * t + th))
    ay = math.sqrt(comb.line_power_w)
    for f, ph in zip(comb.freqs, comb.phases):
        s += ay * np.exp(1j * (2 * np.pi * (f - f_ref) * t + ph))
    return np.sqrt(2.0 / (consts.c * consts.epsilon_0 * consts.a_e)) * np.abs(s)


def approx_envelope(carriers: CarrierPlan, comb: MfcPlan, if_map: IfMap, t,
                    consts: PhysicalConstants = DEFAULT_CONSTANTS):
    """Linear envelope: U_y + B^-1/2 * sum_i U_x,i cos(2 pi df_i t + dphi_i)."""
    if if_map.n != carriers.n:
        raise ValueError("IF map does not match the carrier plan")
    _check_weak(carriers, comb)
    t = np.asarray(t, dtype=float)
    u_y = field_amplitude(comb.total_power_w, consts)
    u_x = field_amplitude(carriers.powers, consts)
    u = np.full(t.shape, float(u_y))
    for ux, df, dphi in zip(u_x, if_map.delta_f_hz, if_map.delta_phi_rad):
        u += ux * np.cos(2 * np.pi * df * t + dphi) / math.sqrt(comb.b)
    return u


def envelope_grid(carriers: CarrierPlan, comb: MfcPlan, if_map: IfMap, n_slow: int = 10,
                  samples_per_fast: int = 64) -> np.ndarray:
    """Uniform grid: 64 samples per fastest component, 10 periods of the slowest beat."""
    tones = np.concatenate([carriers.freqs, comb.freqs])
    fastest = max(tones.max() - tones.min(), np.max(np.abs(if_map.delta_f_hz)))
    beats = np.abs(if_map.delta_f_hz)
    beats = beats[beats > 0]
    slowest = beats.min() if beats.size else fastest
    if fastest <= 0:
        fastest = slowest
    window = n_slow / slowest
    n = int(math.ceil(window * fastest * samples_per_fast))
    return np.arange(n) * (window / n)


def band_limit(x: np.ndarray, dt: float, cutoff_hz: float) -> np.ndarray:
    """Ideal low-pass over a periodic window (FFT brick wall)."""
    spec = np.fft.rfft(x)
    f = np.fft.rfftfreq(x.size, dt)
    spec[f > cutoff_hz] = 0.0
    return np.fft.irfft(spec, n=x.size)


def band_limited_envelope(carriers: CarrierPlan, comb: MfcPlan, t, bandwidth_hz: float,
                          consts: PhysicalConstants = DEFAULT_CONSTANTS):
    """Envelope seen through a response of finite bandwidth.

    The instantaneous power |z|^2 is low-passed (beats above ``bandwidth_hz``
    average out) before taking the square root; ``t`` must be a uniform grid
    spanning a whole number of periods of the in-band beats.
    """
    t = np.asarray(t, dtype=float)
    u2 = exact_envelope(carriers, comb, t, consts) ** 2
    return np.sqrt(np.clip(band_limit(u2, t[1] - t[0], bandwidth_hz), 0.0, None))


@dataclass(frozen=True)
class ApproximationError:
    rel_rms_error: float
    power_ratio: float


def approximation_error(carriers: CarrierPlan, comb: MfcPlan, if_map: IfMap, window: float | None = None,
                        bandwidth_hz: float | None = None, samples_per_fast: int = 64,
                        consts: PhysicalConstants = DEFAULT_CONSTANTS) -> ApproximationError:
    """RMS of (approx - exact)/exact over a uniform grid.

    ``bandwidth_hz`` optionally compares against :func:`band_limited_envelope`
    instead of the raw magnitude, modelling an atomic response that cannot
    follow beats faster than its instantaneous bandwidth.
    """
    if window is None:
        t = envelope_grid(carriers, comb, if_map, samples_per_fast=samples_per_fast)
    else:
        beats = np.abs(if_map.delta_f_hz)
        beats = beats[beats > 0]
        if beats.size and window * beats.min() < 10 - 1e-9:
            raise ValueError("window must cover at least 10 periods of the slowest beat")
        tones = np.concatenate([carriers.freqs, comb.freqs])
        fastest = max(tones.max() - tones.min(), 1.0 / window)
        n = int(math.ceil(window * fastest * samples_per_fast))
        t = np.arange(n) * (window / n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        approx = approx_envelope(carriers, comb, if_map, t, consts)
    if bandwidth_hz is None:
        exact = exact_envelope(carriers, comb, t, consts)
    else:
        exact = band_limited_envelope(carriers, comb, t, bandwidth_hz, consts)
        approx = band_limit(approx, t[1] - t[0], bandwidth_hz)
    with np.errstate(divide="ignore", invalid="ignore"):
        # a vanishing exact envelope makes the relative error unbounded
        err = float(np.sqrt(np.mean(((approx - exact) / exact) ** 2)))
    ratio = float(carriers.powers.sum() / comb.total_power_w) if comb.total_power_w > 0 else math.inf
    return ApproximationError(err, ratio)
