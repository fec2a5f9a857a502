"""Monostatic multi-target sensing: echo synthesis, MUSIC, CRB and Monte Carlo MSE.

Carrier i (i = 1..N) sits at f_c + i*df.  The echo of target k carries the
range phase exp(-j 4pi/c i df r_k) across carriers and the steering phase
exp(-j 2pi/lambda_c m d sin theta_k) across sensors (m = 1..M).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.signal import find_peaks

from .array import LinearArray
from .constants import c as SPEED_OF_LIGHT
from .errors import DegenerateGeometry, SubspaceDegenerate


@dataclass(frozen=True)
class Target:
    aoa_rad: float
    range_m: float
    reflection: complex = 1.0

    def __post_init__(self):
        if not -math.pi / 2 <= self.aoa_rad <= math.pi / 2:
            raise ValueError("AoA must lie in [-pi/2, pi/2]")
        if self.range_m <= 0:
            raise ValueError("range must be positive")

    def echo_amplitude(self, f_c: float) -> complex:
        """alpha~ = alpha exp(-j 4pi f_c r / c)."""
        return self.reflection * np.exp(-4j * np.pi * f_c * self.range_m / SPEED_OF_LIGHT)


@dataclass(frozen=True)
class SensingGrid:
    f_c_hz: float
    delta_f_hz: float
    n_carriers: int
    aoa_step_rad: float = math.radians(0.01)
    range_step_m: float = 0.1
    aoa_span_rad: tuple[float, float] = (-math.pi / 2, math.pi / 2)
    range_span_m: tuple[float, float] | None = None   # default [0, c/(2 df))

    def __post_init__(self):
        if self.n_carriers < 1 or self.delta_f_hz <= 0 or self.f_c_hz <= 0:
            raise ValueError("need f_c > 0, df > 0 and N >= 1")
        if self.aoa_step_rad <= 0 or self.range_step_m <= 0:
            raise ValueError("grid steps must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c_hz

    @property
    def carrier_index(self) -> np.ndarray:
        return np.arange(1, self.n_carriers + 1)

    @property
    def max_range(self) -> float:
        return SPEED_OF_LIGHT / (2.0 * self.delta_f_hz)

    def aoa_grid(self) -> np.ndarray:
        lo, hi = self.aoa_span_rad
        n = int(round((hi - lo) / self.aoa_step_rad))
        return lo + self.aoa_step_rad * np.arange(n + 1)

    def range_grid(self) -> np.ndarray:
        lo, hi = self.range_span_m or (0.0, self.max_range)
        n = int(math.floor((hi - lo) / self.range_step_m - 1e-9))
        return lo + self.range_step_m * np.arange(n + 1)

    def range_steering(self, r) -> np.ndarray:
        """[c(r)]_i = exp(-j 4pi/c i df r); shape (N,) or (N, len(r))."""
        return np.exp(-4j * np.pi / SPEED_OF_LIGHT * self.delta_f_hz
                      * np.multiply.outer(self.carrier_index, np.asarray(r, dtype=float)))

    def with_carriers(self, n: int) -> "SensingGrid":
        return SensingGrid(self.f_c_hz, self.delta_f_hz, n, self.aoa_step_rad, self.range_step_m,
                           self.aoa_span_rad, self.range_span_m)


def _kappa_vec(kappa, m: int) -> np.ndarray:
    k = np.asarray(kappa, dtype=complex)
    return np.full(m, complex(k)) if k.ndim == 0 else k


def unit_modulus_symbols(j: int, rng: np.random.Generator) -> np.ndarray:
    """Random-phase constant-modulus snapshot signal with unit power."""
    return np.exp(2j * np.pi * rng.random(j))


# --------------------------------------------------------------------------
# echo model


def echo_signal(targets, grid: SensingGrid, array: LinearArray, kappa, s) -> np.ndarray:
    """Noiseless echoes, shape (N, M, J)."""
    k = _kappa_vec(kappa, array.n_sensors)
    s = np.asarray(s, dtype=complex)
    out = np.zeros((grid.n_carriers, array.n_sensors, s.size), dtype=complex)
    for t in targets:
        a = k * array.steering(t.aoa_rad, grid.wavelength)
        cr = grid.range_steering(t.range_m)
        out += t.echo_amplitude(grid.f_c_hz) * cr[:, None, None] * a[None, :, None] * s[None, None, :]
    return out


def synthesize_echoes(targets, grid: SensingGrid, array: LinearArray, kappa, noise_var: float,
                      j: int, rng: np.random.Generator, s=None) -> np.ndarray:
    """Y_i = K A S_1 + W_i for every carrier, shape (N, M, J).

    Noise is circular complex Gaussian with variance ``noise_var`` per entry.
    """
    if j < len(targets):
        raise ValueError("need at least as many snapshots as targets")
    if s is None:
        s = unit_modulus_symbols(j, rng)
    y = echo_signal(targets, grid, array, kappa, s)
    if noise_var > 0:
        sd = math.sqrt(noise_var / 2.0)
        y = y + sd * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
    return y


# --------------------------------------------------------------------------
# MUSIC


@dataclass(frozen=True)
class SubspaceDecomposition:
    eigenvalues: np.ndarray      # descending
    signal_basis: np.ndarray
    noise_basis: np.ndarray


def subspace(cov: np.ndarray, k: int) -> SubspaceDecomposition:
    lam, vec = np.linalg.eigh(0.5 * (cov + cov.conj().T))
    lam, vec = lam[::-1], vec[:, ::-1]
    if k >= lam.size:
        raise SubspaceDegenerate(f"{k} sources need more than {lam.size} dimensions")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = lam[k - 1] / lam[k] if lam[k] > 0 else math.inf
    if not ratio >= 1.0 + 1e-9:
        raise SubspaceDegenerate(f"eigenvalue ratio {ratio:.3g} at the signal/noise split")
    return SubspaceDecomposition(lam, vec[:, :k], vec[:, k:])


def _null_projection(us: np.ndarray, v: np.ndarray) -> np.ndarray:
    """||U_n^H v||^2 per column of v, via ||v||^2 - ||U_s^H v||^2."""
    tot = np.sum(np.abs(v) ** 2, axis=0)
    den = tot - np.sum(np.abs(us.conj().T @ v) ** 2, axis=0)
    return np.maximum(den, tot * 1e-300 + 1e-300)


@dataclass(frozen=True)
class SpectrumEstimate:
    grid: np.ndarray
    spectrum: np.ndarray
    estimates: np.ndarray
    eigenvalues: np.ndarray = field(repr=False, default=None)


def pick_peaks(grid: np.ndarray, spectrum: np.ndarray, k: int) -> np.ndarray:
    """K most prominent local maxima, refined by a parabola through three dB samples.

    Returned in ascending grid order.
    """
    db = 10.0 * np.log10(spectrum)
    idx, props = find_peaks(db, prominence=0.0)
    if idx.size < k:
        # fall back to the plain maxima when the spectrum has fewer lobes than sources
        extra = [i for i in np.argsort(db)[::-1] if i not in set(idx)]
        idx = np.concatenate([idx, extra[: k - idx.size]]).astype(int)
        prom = np.concatenate([props["prominences"], np.zeros(k - props["prominences"].size)])
    else:
        prom = props["prominences"]
    best = idx[np.argsort(-prom, kind="stable")[:k]]
    step = grid[1] - grid[0]
    est = []
    for i in best:
        x = grid[i]
        if 0 < i < grid.size - 1:
            y0, y1, y2 = db[i - 1], db[i], db[i + 1]
            curv = y0 - 2 * y1 + y2
            if curv < 0:
                x += 0.5 * step * (y0 - y2) / curv
        est.append(x)
    return np.sort(np.array(est))


def music_aoa(y: np.ndarray, kappa, k: int, grid: SensingGrid, array: LinearArray,
              aoa_grid: np.ndarray | None = None) -> SpectrumEstimate:
    """AoA MUSIC over all carriers and snapshots as a virtual snapshot set.

    ``y`` has shape (N, M, J); R = (1/NJ) Y Y^H with Y = [Y_1 ... Y_N].
    """
    n, m, j = y.shape
    ycat = np.transpose(y, (1, 0, 2)).reshape(m, n * j)
    cov = ycat @ ycat.conj().T / (n * j)
    sub = subspace(cov, k)
    th = grid.aoa_grid() if aoa_grid is None else aoa_grid
    ka = _kappa_vec(kappa, m)[:, None] * array.steering(th, grid.wavelength)
    spec = 1.0 / _null_projection(sub.signal_basis, ka)
    return SpectrumEstimate(th, spec, pick_peaks(th, spec, k), sub.eigenvalues)


def beamformers(theta_hat, kappa, grid: SensingGrid, array: LinearArray,
                mode: str = "zf") -> np.ndarray:
    """Unit-norm spatial combiners, one column per estimated AoA.

    ``matched`` uses b = K a(theta_k); ``zf`` additionally nulls the other
    estimated directions, which removes leakage between close targets.
    """
    b = _kappa_vec(kappa, array.n_sensors)[:, None] * array.steering(np.asarray(theta_hat),
                                                                     grid.wavelength)
    if mode == "zf" and b.shape[1] > 1:
        w = b @ np.linalg.pinv(b.conj().T @ b)
    elif mode in ("zf", "matched"):
        w = b
    else:
        raise ValueError(f"unknown beamformer {mode!r}")
    return w / np.linalg.norm(w, axis=0)


def beamform_and_music_range(y: np.ndarray, theta_hat, kappa, grid: SensingGrid,
                             array: LinearArray, mode: str = "zf",
                             range_grid: np.ndarray | None = None) -> list[SpectrumEstimate]:
    """Per-target range MUSIC on the beamformed N x J matrix (one signal dimension)."""
    w = beamformers(theta_hat, kappa, grid, array, mode)
    rg = grid.range_grid() if range_grid is None else range_grid
    cr = grid.range_steering(rg)
    out = []
    for col in range(w.shape[1]):
        yk = np.einsum("m,imj->ij", w[:, col].conj(), y)
        cov = yk @ yk.conj().T / yk.shape[1]
        sub = subspace(cov, 1)
        spec = 1.0 / _null_projection(sub.signal_basis, cr)
        out.append(SpectrumEstimate(rg, spec, pick_peaks(rg, spec, 1), sub.eigenvalues))
    return out


# --------------------------------------------------------------------------
# Fisher information and CRB


def echo_partials(target: Target, grid: SensingGrid, array: LinearArray, kappa, s):
    """g_i[n] and its analytic partials with respect to theta and r, each (N, M, J)."""
    g = echo_signal([target], grid, array, kappa, s)
    m = array.index[None, :, None]
    i = grid.carrier_index[:, None, None]
    d_theta = -2j * np.pi / grid.wavelength * array.spacing_m * math.cos(target.aoa_rad) * m * g
    d_r = -4j * np.pi / SPEED_OF_LIGHT * grid.delta_f_hz * i * g
    return g, d_theta, d_r


def fim_numeric(target: Target, grid: SensingGrid, array: LinearArray, kappa, noise_var: float,
                j: int, s=None) -> np.ndarray:
    """F = sum_i 2/sigma^2 sum_n Re{dg dg^H} by direct summation over m, i and n."""
    if s is None:
        s = np.ones(j)
    _, dt, dr = echo_partials(target, grid, array, kappa, s)
    parts = (dt, dr)
    f = np.empty((2, 2))
    for a in range(2):
        for b in range(2):
            f[a, b] = 2.0 / noise_var * np.sum((parts[a] * parts[b].conj()).real)
    return f


@dataclass(frozen=True)
class CrbPair:
    crb_theta: float   # rad^2
    crb_r: float       # m^2


def _snr_bar(target: Target, grid: SensingGrid, noise_var: float, p_s: float) -> float:
    return abs(target.echo_amplitude(grid.f_c_hz)) ** 2 * p_s / noise_var


def crb_closed_form(target: Target, grid: SensingGrid, array: LinearArray, kappa,
                    noise_var: float, j: int, p_s: float = 1.0) -> CrbPair:
    """Closed-form CRBs for a single target with weighted index moments mu1, mu2."""
    cth = math.cos(target.aoa_rad)
    if abs(cth) < 1e-15:
        raise DegenerateGeometry("endfire target: the AoA bound is unbounded")
    w = np.abs(_kappa_vec(kappa, array.n_sensors)) ** 2
    sk = float(np.sum(w))
    if sk <= 0:
        raise ValueError("sum of |kappa|^2 must be positive")
    m = array.index
    mu1 = float(np.sum(w * m) / sk)
    mu2 = float(np.sum(w * m * m) / sk)
    n = grid.n_carriers
    p = _snr_bar(target, grid, noise_var, p_s)
    lam, d, df = grid.wavelength, array.spacing_m, grid.delta_f_hz
    crb_t = (lam**2 / (4 * math.pi**2 * j * p * d**2 * cth**2)
             * (2 * n + 1) / (n * sk * ((4 * n + 2) * mu2 - 3 * (n + 1) * mu1**2)))
    crb_r = (SPEED_OF_LIGHT**2 / (32 * math.pi**2 * j * p * df**2)
             * mu2 / (n * (n + 1) * sk * ((2 * n + 1) / 6 * mu2 - (n + 1) / 4 * mu1**2)))
    return CrbPair(crb_t, crb_r)


def crb_equal_gain(target: Target, grid: SensingGrid, array: LinearArray, kappa_abs: float,
                   noise_var: float, j: int, p_s: float = 1.0) -> CrbPair:
    """Closed-form CRBs when every sensor has the same gain magnitude."""
    cth = math.cos(target.aoa_rad)
    if abs(cth) < 1e-15:
        raise DegenerateGeometry("endfire target: the AoA bound is unbounded")
    n, m = grid.n_carriers, array.n_sensors
    p = _snr_bar(target, grid, noise_var, p_s)
    k2 = kappa_abs**2
    lam, d, df = grid.wavelength, array.spacing_m, grid.delta_f_hz
    common = 7 * m * n - m - n - 5
    crb_t = (3 * lam**2 / (math.pi**2 * j * p * d**2 * cth**2)
             * (2 * n + 1) / (n * m * k2 * (m + 1) * common))
    crb_r = (SPEED_OF_LIGHT**2 / (4 * math.pi**2 * j * p * df**2)
             * 3 * (2 * m + 1) / (n * (n + 1) * m * k2 * common))
    return CrbPair(crb_t, crb_r)


# --------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class TrialEstimate:
    aoa: np.ndarray     # matched to targets
    ranges: np.ndarray


def estimate_targets(y, targets, kappa, grid: SensingGrid, array: LinearArray,
                     mode: str = "zf") -> TrialEstimate:
    """Full pipeline for one trial; estimates are associated to targets by AoA."""
    k = len(targets)
    aoa = music_aoa(y, kappa, k, grid, array)
    rng_est = beamform_and_music_range(y, aoa.estimates, kappa, grid, array, mode)
    truth = np.array([t.aoa_rad for t in targets])
    cost = np.abs(truth[:, None] - aoa.estimates[None, :])
    rows, cols = linear_sum_assignment(cost)
    order = cols[np.argsort(rows)]
    return TrialEstimate(aoa.estimates[order], np.array([rng_est[c].estimates[0] for c in order]))


@dataclass(frozen=True)
class MseResult:
    mse_theta: np.ndarray     # per target, rad^2
    mse_r: np.ndarray         # per target, m^2
    se_theta: np.ndarray      # standard error of the MSE
    se_r: np.ndarray
    crb: list[CrbPair]
    trials: int

    def mean(self):
        return (float(np.mean(self.mse_theta)), float(np.mean(self.mse_r)),
                float(np.mean([c.crb_theta for c in self.crb])),
                float(np.mean([c.crb_r for c in self.crb])))


def monte_carlo_mse(targets, grid: SensingGrid, array: LinearArray, kappa, noise_var: float,
                    j: int, trials: int, rng_for_trial, mode: str = "zf",
                    executor=None) -> MseResult:
    """Sample MSE of the MUSIC pipeline over independent noise realizations.

    ``rng_for_trial(t)`` returns the generator for trial t, so the result does
    not depend on how trials are scheduled across workers.
    """
    truth_t = np.array([t.aoa_rad for t in targets])
    truth_r = np.array([t.range_m for t in targets])

    def one(t):
        rng = rng_for_trial(t)
        y = synthesize_echoes(targets, grid, array, kappa, noise_var, j, rng)
        try:
            est = estimate_targets(y, targets, kappa, grid, array, mode)
        except SubspaceDegenerate:
            return np.full(len(targets), math.pi**2 / 4), np.full(len(targets), grid.max_range**2)
        return (est.aoa - truth_t) ** 2, (est.ranges - truth_r) ** 2

    runs = list(executor.map(one, range(trials))) if executor else [one(t) for t in range(trials)]
    et = np.array([r[0] for r in runs])
    er = np.array([r[1] for r in runs])
    root = math.sqrt(trials)
    crb = [crb_closed_form(t, grid, array, kappa, noise_var, j) for t in targets]
    return MseResult(et.mean(0), er.mean(0), et.std(0, ddof=1) / root if trials > 1 else 0 * et[0],
                     er.std(0, ddof=1) / root if trials > 1 else 0 * er[0], crb, trials)
