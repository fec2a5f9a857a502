"""Comb planning: nearest-line IF assignment, ambiguity detection and plan designers."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PlanInfeasible
from .waveform import CarrierPlan, CombLine, IfMap, MfcPlan


@dataclass(frozen=True)
class BandBudget:
    """Usable IF band and the spacing floors a plan must respect (all Hz)."""

    if_max_hz: float = 5e6
    min_if_separation_hz: float = 0.1e6
    min_comb_spacing_hz: float = 10.5e6

    def __post_init__(self):
        if not 0 < self.min_if_separation_hz < self.if_max_hz:
            raise ValueError("need 0 < min_if_separation < if_max")
        if self.min_comb_spacing_hz <= 2 * self.if_max_hz:
            raise ValueError("min_comb_spacing must exceed twice the IF band")


def if_assignment(carriers: CarrierPlan, comb: MfcPlan) -> IfMap:
    """Map each carrier to its nearest comb line (ties go to the lower line)."""
    fy = comb.freqs
    fx = carriers.freqs
    dist = np.abs(fx[:, None] - fy[None, :])
    idx = np.argmin(dist, axis=1)  # first minimum = lower-frequency line
    return IfMap(idx, fx - fy[idx], carriers.phases - comb.phases[idx])


def detect_ambiguity(if_map: IfMap, resolution_hz: float) -> list[list[int]]:
    """Groups of carriers whose |IF| values lie within ``resolution_hz`` of each other.

    Groups are chained: a, b, c collide if |a|~|b| and |b|~|c|.
    """
    if resolution_hz <= 0:
        raise ValueError("resolution must be positive")
    mag = np.abs(if_map.delta_f_hz)
    order = np.argsort(mag, kind="stable")
    groups, cur = [], [int(order[0])] if order.size else []
    for a, b in zip(order[:-1], order[1:]):
        if mag[b] - mag[a] < resolution_hz:
            cur.append(int(b))
        else:
            if len(cur) > 1:
                groups.append(sorted(cur))
            cur = [int(b)]
    if len(cur) > 1:
        groups.append(sorted(cur))
    return groups


def uniform_comb_for(carriers: CarrierPlan, rate_hz: float, total_power_w: float,
                     origin_hz: float = 0.0) -> MfcPlan:
    """Lines at origin + k*rate, covering the nearest line of every carrier."""
    fx = carriers.freqs
    k_lo = math.floor((fx.min() - origin_hz) / rate_hz)
    k_hi = math.ceil((fx.max() - origin_hz) / rate_hz)
    return MfcPlan.uniform(origin_hz + k_lo * rate_hz, rate_hz, k_hi - k_lo + 1, total_power_w)


@dataclass(frozen=True)
class UniformDesign:
    combs: tuple[MfcPlan, ...]
    if_map: IfMap


def design_uniform(carriers: CarrierPlan, budget: BandBudget, candidate_rates,
                   total_power_w: float = 1.0, origin_hz: float = 0.0) -> UniformDesign:
    """Greedy first-fit of carriers onto a sequence of uniform combs.

    Each carrier takes the first comb (in candidate order) whose nearest-line
    IF is within the band, non-zero and clear of every IF already placed.
    Only combs that receive a carrier are kept.
    """
    rates = list(candidate_rates)
    if not rates:
        raise ValueError("need at least one candidate repetition rate")
    for r in rates:
        if r < budget.min_comb_spacing_hz:
            raise PlanInfeasible(f"repetition rate {r:g} Hz is below the comb spacing floor")
    combs = [uniform_comb_for(carriers, r, total_power_w, origin_hz) for r in rates]
    maps = [if_assignment(carriers, c) for c in combs]
    chosen = np.full(carriers.n, -1)
    placed: list[float] = []
    for i in range(carriers.n):
        for k, m in enumerate(maps):
            df = abs(m.delta_f_hz[i])
            if df > budget.if_max_hz or df < budget.min_if_separation_hz:
                continue
            if any(abs(df - p) < budget.min_if_separation_hz for p in placed):
                continue
            chosen[i] = k
            placed.append(df)
            break
        else:
            raise PlanInfeasible(f"carrier {i} cannot be placed on any candidate comb",
                                 carrier_index=i)
    used = sorted(set(chosen.tolist()))
    remap = {k: n for n, k in enumerate(used)}
    line_index = np.array([maps[chosen[i]].line_index[i] for i in range(carriers.n)])
    delta_f = np.array([maps[chosen[i]].delta_f_hz[i] for i in range(carriers.n)])
    delta_phi = np.array([maps[chosen[i]].delta_phi_rad[i] for i in range(carriers.n)])
    comb_index = np.array([remap[k] for k in chosen])
    return UniformDesign(tuple(combs[k] for k in used),
                         IfMap(line_index, delta_f, delta_phi, comb_index))


def design_nonuniform(carriers: CarrierPlan, budget: BandBudget, delta_hz: float,
                      total_power_w: float = 1.0, literal_ladder: bool = False):
    """One comb line per carrier so that carrier i sees an IF of k_i * delta.

    By default k_i = i + 1, which keeps the first carrier off DC;
    ``literal_ladder`` uses k_i = i.  A line is moved to the other side of
    its carrier (IF sign flipped) when that is needed to respect the comb
    spacing floor.  Returns ``(MfcPlan, IfMap)``.
    """
    n = carriers.n
    k = np.arange(n) + (0 if literal_ladder else 1)
    if k.max() * delta_hz > budget.if_max_hz + 1e-9 * budget.if_max_hz:
        raise PlanInfeasible("IF ladder does not fit in the IF band")
    if delta_hz < budget.min_if_separation_hz:
        raise PlanInfeasible("delta is below the minimum IF separation")
    fx = carriers.freqs
    lines = np.empty(n)
    sign = np.ones(n)
    for i in range(n):
        lines[i] = fx[i] - k[i] * delta_hz
        if i and lines[i] - lines[i - 1] < budget.min_comb_spacing_hz:
            lines[i] = fx[i] + k[i] * delta_hz
            sign[i] = -1.0
            if lines[i] - lines[i - 1] < budget.min_comb_spacing_hz:
                raise PlanInfeasible(f"comb spacing floor violated at carrier {i}", carrier_index=i)
    comb = MfcPlan(tuple(CombLine(float(f)) for f in lines), total_power_w)
    # lines are one per carrier, in carrier order; the nearest-line rule must agree
    if_map = if_assignment(carriers, comb)
    if not np.array_equal(if_map.line_index, np.arange(n)):
        raise PlanInfeasible("a carrier is nearer to another carrier's line")
    exact = IfMap(np.arange(n), sign * k * delta_hz, if_map.delta_phi_rad)
    return comb, exact
