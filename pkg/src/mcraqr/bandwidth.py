"""Transient bandwidth sweep: extracted-signal power versus total signal bandwidth.

N QAM subcarriers share a total bandwidth W, so each carries W/N symbols per
second.  The weak-signal envelope Omega_y + sum_i a_i Re{s_i(t) e^{j 2pi f_i t}}
drives the master equation from its steady state; the detector output is
correlated with each IF over every symbol and the coherent gain against the
transmitted symbols is recorded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .comms import random_qam, three_db_bandwidth
from .optics import (DetectorConfig, ProbeConfig, bcod_output_from_chi, detector_slope,
                     operating_point)
from .quantum import (AtomicSystem, steady_state_numeric, susceptibility_prefactor,
                      transient_integrate)


@dataclass(frozen=True)
class IfLayout:
    """How carrier IFs are set for a receiver scheme.

    ``fixed_hz`` gives IFs that do not depend on the bandwidth (comb
    schemes); otherwise IF_i = (i + 1) * W / N, a single LO one subcarrier
    spacing below a contiguous block.
    """

    name: str
    fixed_hz: tuple[float, ...] | None = None

    def ifs(self, total_bw_hz: float, n: int) -> np.ndarray:
        if self.fixed_hz is not None:
            if len(self.fixed_hz) != n:
                raise ValueError("IF layout and carrier count differ")
            return np.asarray(self.fixed_hz, dtype=float)
        return (np.arange(n) + 1.0) * total_bw_hz / n


def single_lo_layout() -> IfLayout:
    return IfLayout("single_lo")


@dataclass(frozen=True)
class SweepPoint:
    bandwidth_hz: float
    power: float          # mean |coherent gain|^2 relative to the quasi-static slope
    per_carrier: np.ndarray


def simulate_point(sys: AtomicSystem, omega_y: float, probe: ProbeConfig, det: DetectorConfig,
                   layout: IfLayout, total_bw_hz: float, symbols: np.ndarray,
                   rel_amplitude: float = 1e-3, samples_per_period: int = 20,
                   cold_start: bool = False) -> SweepPoint:
    """Coherent gain of every carrier for one total bandwidth.

    ``symbols`` has shape (N, n_symbols) and unit average power.  Each carrier
    modulates Omega_z with peak-normalised amplitude ``rel_amplitude * omega_y``
    per unit symbol.  The result is normalised by the quasi-static detector
    slope, so a slow, linear receiver gives 1 for every carrier.
    """
    n, n_sym = symbols.shape
    rs = total_bw_hz / n
    t_sym = 1.0 / rs
    f_if = layout.ifs(total_bw_hz, n)
    f_top = float(np.max(np.abs(f_if))) + rs
    per_sym = max(samples_per_period, int(math.ceil(samples_per_period * f_top * t_sym)))
    dt = t_sym / per_sym
    t = dt * np.arange(n_sym * per_sym + 1)
    sym_idx = np.minimum((t / t_sym).astype(int), n_sym - 1)
    a = rel_amplitude * omega_y
    drive = np.zeros(t.size)
    for i in range(n):
        drive += a * np.real(symbols[i, sym_idx] * np.exp(2j * np.pi * f_if[i] * t))
    oz = omega_y + drive
    rho0 = None if cold_start else steady_state_numeric(sys, omega_y)
    rho = transient_integrate(sys, oz, t, rho0=rho0, min_period=1.0 / f_top)
    chi = susceptibility_prefactor(sys) * rho[:, 1, 0]
    v = bcod_output_from_chi(chi, sys.cell_length, probe, det)
    op = operating_point(sys, omega_y, probe, det)
    slope = -detector_slope(op, probe, det, 2 * sys.cell_length)
    if slope == 0:
        raise ValueError("detector slope vanishes at this operating point")
    ac = v[:-1] - op.dc
    tt = t[:-1]
    gains = np.empty(n, dtype=complex)
    for i in range(n):
        ref = np.exp(-2j * np.pi * f_if[i] * tt)
        est = 2.0 * (ac * ref).reshape(n_sym, per_sym).mean(axis=1) / (a * slope)
        gains[i] = np.vdot(symbols[i], est) / np.vdot(symbols[i], symbols[i])
    pc = np.abs(gains) ** 2
    return SweepPoint(total_bw_hz, float(pc.mean()), pc)


def bandwidth_sweep(sys: AtomicSystem, omega_y: float, probe: ProbeConfig, det: DetectorConfig,
                    layout: IfLayout, bandwidths_hz, n_carriers: int, n_symbols: int,
                    rng: np.random.Generator, qam_order: int = 64,
                    rel_amplitude: float = 1e-3, cold_start: bool = False) -> list[SweepPoint]:
    """Sweep the total bandwidth with one fixed set of random QAM symbols."""
    symbols = random_qam(qam_order, n_carriers * n_symbols, rng).reshape(n_carriers, n_symbols)
    return [simulate_point(sys, omega_y, probe, det, layout, float(w), symbols, rel_amplitude,
                           cold_start=cold_start)
            for w in bandwidths_hz]


def normalized_curve(points: list[SweepPoint]) -> tuple[np.ndarray, np.ndarray, float]:
    """(bandwidths, power normalised to the narrowest point, 3 dB bandwidth)."""
    bw = np.array([p.bandwidth_hz for p in points])
    pw = np.array([p.power for p in points])
    norm = pw / pw[0]
    return bw, norm, three_db_bandwidth(bw, norm)
