"""Uplink multi-carrier link budget: channel, MRC SNR and capacity."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .array import LinearArray
from .constants import c as SPEED_OF_LIGHT
from .optics import NoisePowers


@dataclass(frozen=True)
class User:
    beta: float          # large-scale channel gain (power, dimensionless)
    distance_m: float
    aoa_rad: float = 0.0

    def __post_init__(self):
        if self.distance_m <= 0:
            raise ValueError("distance must be positive")
        if self.beta < 0:
            raise ValueError("channel gain must be non-negative")


@dataclass(frozen=True)
class CommScenario:
    """One user per carrier.

    ``if_hz`` holds the intermediate frequency of each carrier; the channel
    phase depends on it through the propagation delay.
    """

    users: tuple[User, ...]
    tx_power_w: float
    bandwidth_hz: tuple[float, ...]
    if_hz: tuple[float, ...]
    qam_order: int = 64

    def __post_init__(self):
        n = len(self.users)
        if len(self.bandwidth_hz) != n or len(self.if_hz) != n:
            raise ValueError("users, bandwidths and IFs must have equal length")
        if any(b <= 0 for b in self.bandwidth_hz):
            raise ValueError("carrier bandwidths must be positive")
        if self.tx_power_w < 0:
            raise ValueError("transmit power must be non-negative")
        side = math.isqrt(self.qam_order)
        if side * side != self.qam_order or side < 2:
            raise ValueError("QAM order must be a square >= 4")

    @property
    def n(self) -> int:
        return len(self.users)

    def received_power(self, i: int) -> float:
        """Mean incident power P_c beta_i / r^2."""
        u = self.users[i]
        return self.tx_power_w * u.beta / u.distance_m**2


def channel_vector(scn: CommScenario, array: LinearArray, i: int) -> np.ndarray:
    """h_{i,m} = sqrt(beta_i)/r exp(-j 2pi/c df_i (r + m d sin theta)), m = 1..M."""
    u = scn.users[i]
    path = u.distance_m + array.index * array.spacing_m * math.sin(u.aoa_rad)
    return math.sqrt(u.beta) / u.distance_m * np.exp(-2j * np.pi / SPEED_OF_LIGHT * scn.if_hz[i] * path)


def _gain_vector(kappa, m: int) -> np.ndarray:
    k = np.asarray(kappa, dtype=complex)
    return np.full(m, complex(k)) if k.ndim == 0 else k


def mrc_snr(scn: CommScenario, array: LinearArray, kappa, noise: NoisePowers, i: int) -> float:
    """gamma_i = 2 P_bar_i sum|kappa_m|^2 / (qpn + psn + itn)."""
    k = _gain_vector(kappa, array.n_sensors)
    denom = noise.qpn + noise.psn + noise.itn
    if denom <= 0:
        raise ValueError("noise variance must be positive")
    return 2.0 * scn.received_power(i) * float(np.sum(np.abs(k) ** 2)) / denom


def capacity(bandwidths, snrs) -> float:
    """R = sum_i B_i log2(1 + gamma_i), bit/s."""
    b = np.asarray(bandwidths, dtype=float)
    g = np.asarray(snrs, dtype=float)
    return float(np.sum(b * np.log2(1.0 + g)))


def qam_constellation(order: int) -> np.ndarray:
    """Square QAM points scaled to unit average power."""
    side = math.isqrt(order)
    lv = np.arange(-(side - 1), side, 2, dtype=float)
    pts = (lv[:, None] + 1j * lv[None, :]).ravel()
    return pts / math.sqrt(np.mean(np.abs(pts) ** 2))


def random_qam(order: int, n: int, rng: np.random.Generator) -> np.ndarray:
    return qam_constellation(order)[rng.integers(0, order, size=n)]


def monte_carlo_snr(scn: CommScenario, array: LinearArray, kappa, noise: NoisePowers, i: int,
                    n_symbols: int, rng: np.random.Generator) -> float:
    """Symbol-level estimate of the post-MRC SNR of carrier i.

    Simulates y = K h sqrt(P_c) s + w with w ~ CN(0, sigma_w^2 I), combines
    with f = K h and measures signal and residual power separately.
    """
    k = _gain_vector(kappa, array.n_sensors)
    f = k * channel_vector(scn, array, i)
    s = random_qam(scn.qam_order, n_symbols, rng)
    sigma2 = noise.total
    w = math.sqrt(sigma2 / 2.0) * (rng.standard_normal((array.n_sensors, n_symbols))
                                   + 1j * rng.standard_normal((array.n_sensors, n_symbols)))
    y = np.outer(f, math.sqrt(scn.tx_power_w) * s) + w
    fn = np.linalg.norm(f)
    z = (f.conj() @ y) / fn
    sig = fn * math.sqrt(scn.tx_power_w) * s
    return float(np.mean(np.abs(sig) ** 2) / np.mean(np.abs(z - sig) ** 2))


# --------------------------------------------------------------------------
# receiver variants and bandwidth sweeps


@dataclass(frozen=True)
class RollOff:
    """Relative power transfer versus total signal bandwidth.

    Either a first-order curve 1/(1 + (W/W_3dB)^2) or a tabulated curve,
    interpolated linearly in log-bandwidth and held constant outside.
    """

    f3db_hz: float | None = None
    table_bw_hz: tuple[float, ...] = ()
    table_factor: tuple[float, ...] = ()

    def __post_init__(self):
        if self.f3db_hz is None and not self.table_bw_hz:
            raise ValueError("need either a 3 dB bandwidth or a table")
        if len(self.table_bw_hz) != len(self.table_factor):
            raise ValueError("roll-off table columns differ in length")
        if self.table_bw_hz and np.any(np.diff(self.table_bw_hz) <= 0):
            raise ValueError("roll-off table bandwidths must increase")

    def factor(self, bw_hz):
        w = np.asarray(bw_hz, dtype=float)
        if self.table_bw_hz:
            return np.interp(np.log(w), np.log(self.table_bw_hz), self.table_factor)
        return 1.0 / (1.0 + (w / self.f3db_hz) ** 2)

    def bandwidth_3db(self) -> float:
        if not self.table_bw_hz:
            return float(self.f3db_hz)
        return three_db_bandwidth(self.table_bw_hz, self.table_factor)


def three_db_bandwidth(bw_hz, power) -> float:
    """First crossing of half the initial power (log-linear interpolation); inf if none."""
    bw = np.asarray(bw_hz, dtype=float)
    p = np.asarray(power, dtype=float) / power[0]
    below = np.nonzero(p <= 0.5)[0]
    if below.size == 0:
        return math.inf
    j = below[0]
    if j == 0:
        return float(bw[0])
    x0, x1 = math.log(bw[j - 1]), math.log(bw[j])
    t = (p[j - 1] - 0.5) / (p[j - 1] - p[j])
    return math.exp(x0 + t * (x1 - x0))


@dataclass(frozen=True)
class ReceiverVariant:
    """Per-sensor gain power and noise spectral density of one receiver type."""

    name: str
    kappa_abs2: float          # |kappa|^2 per sensor, A^2/W
    noise_density: float       # (qpn + psn + itn) per Hz, A^2/Hz
    rolloff: RollOff | None = None


def capacity_curve(variant: ReceiverVariant, total_bw_hz, n_carriers: int,
                   p_bar_w, n_sensors: int) -> np.ndarray:
    """Capacity (bit/s) versus total bandwidth W split evenly over the carriers.

    ``p_bar_w`` is the per-carrier incident power (scalar or length N).
    """
    w = np.atleast_1d(np.asarray(total_bw_hz, dtype=float))
    pb = np.broadcast_to(np.asarray(p_bar_w, dtype=float), (n_carriers,))
    out = np.empty(w.size)
    for j, wj in enumerate(w):
        b = wj / n_carriers
        r = 1.0 if variant.rolloff is None else float(variant.rolloff.factor(wj))
        g = 2.0 * pb * n_sensors * variant.kappa_abs2 * r / (variant.noise_density * b)
        out[j] = capacity(np.full(n_carriers, b), g)
    return out
