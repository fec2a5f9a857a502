"""Experiment drivers: scenario in, ResultTables out (one per curve).

Each driver takes a validated :class:`~mcraqr.scenario.Scenario` and an
optional executor for independent work items; results never depend on the
executor because every random draw comes from a keyed substream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .array import LinearArray
from .bandwidth import IfLayout, bandwidth_sweep, normalized_curve, single_lo_layout
from .comms import (CommScenario, ReceiverVariant, RollOff, User, capacity_curve,
                    monte_carlo_snr, mrc_snr)
from .constants import EA0, TWO_PI, PhysicalConstants
from .constants import c as SPEED_OF_LIGHT
from .errors import McraqrError, SchemaError
from .mfc import BandBudget, design_nonuniform, if_assignment, uniform_comb_for
from .optics import (DetectorConfig, NoiseConfig, NoisePowers, ProbeConfig, effective_length,
                     kappa_gain, noise_powers)
from .oracles import (CheckResult, crb_equal_gain_check, crb_fim_check, envelope_check,
                      kappa_constant_check, ladder_fixture, mfc_checks, partials_check,
                      slope_check, snr_check, steady_state_check)
from .quantum import AtomicSystem
from .rng import substream
from .scenario import Scenario
from .sensing import SensingGrid, Target, crb_closed_form, monte_carlo_mse
from .tables import ResultTable, provenance, read_table
from .waveform import Carrier, CarrierPlan, approximation_error

# --------------------------------------------------------------------------
# scenario -> model objects


@dataclass(frozen=True)
class Receiver:
    """Atomic system, optics and noise of one vapor-cell sensor."""

    sys: AtomicSystem
    omega_y: float              # rad/s
    probe: ProbeConfig
    det: DetectorConfig
    noise_cfg: NoiseConfig
    consts: PhysicalConstants
    length_m: float             # gain length entering the AC coefficient

    def rho(self, comb_b: int) -> float:
        """Receiver gain magnitude |kappa| for a comb of B lines (A per sqrt(W))."""
        g = kappa_gain(self.sys, self.omega_y, self.probe, self.det, comb_b, self.length_m,
                       consts=self.consts)
        return abs(g.rho)

    def noise(self, comb_b: int, bandwidth_hz: float) -> NoisePowers:
        g = kappa_gain(self.sys, self.omega_y, self.probe, self.det, comb_b, self.length_m,
                       consts=self.consts)
        return noise_powers(self.noise_cfg, self.det, bandwidth_hz, g.op.probe_power_w, g.rho,
                            self.sys, self.probe, self.consts)

    def with_regime(self, regime: dict) -> "Receiver":
        sys = self.sys.with_(delta_c=TWO_PI * regime["delta_c_hz"],
                             delta_x=TWO_PI * regime["delta_x_hz"],
                             delta_a=TWO_PI * regime["delta_a_hz"],
                             omega_a=TWO_PI * regime["omega_a_hz"])
        return replace(self, sys=sys, omega_y=TWO_PI * regime["omega_y_hz"])


def build_receiver(scn: Scenario) -> Receiver:
    a, p, d = scn.section("atomic"), scn.section("probe"), scn.section("detector")
    rx, nz = scn.section("receiver"), scn.section("noise")
    consts = PhysicalConstants(eta=rx["quantum_efficiency"], a_e=rx["aperture_m2"])
    sys = AtomicSystem.from_hz(
        a["omega_p_hz"], a["omega_c_hz"], a["omega_a_hz"], 0.0, a["delta_c_hz"], a["delta_a_hz"],
        a["delta_x_hz"], a["gamma_2_hz"], mu_12=a["mu_12_ea0"] * EA0, mu_45=a["mu_45_ea0"] * EA0,
        n_atoms=a["n_atoms_per_m3"], cell_length=a["cell_length_m"],
        lambda_p=a["probe_wavelength_m"])
    probe = ProbeConfig.from_power(p["power_w"], p["fwhm_m"], p["phase_rad"],
                                   a["probe_wavelength_m"], consts)
    det = DetectorConfig(d["local_power_w"], d["local_phase_rad"], 10 ** (d["lna_gain_db"] / 10))
    noise = NoiseConfig(nz["temperature_k"], TWO_PI * nz["gamma_nat_hz"],
                        TWO_PI * nz["gamma_bbr_hz"], nz["upsilon_1"], nz["upsilon_2_m3"],
                        nz["qpn_enabled"])
    length = effective_length(rx["spacing_m"], a["cell_length_m"], rx["gain_length"])
    return Receiver(sys, TWO_PI * rx["omega_y_hz"], probe, det, noise, consts, length)


def band_budget(scn: Scenario) -> BandBudget:
    m = scn.section("mfc")
    return BandBudget(m["if_max_hz"], m["min_if_separation_hz"], m["min_comb_spacing_hz"])


def carrier_plan(scn: Scenario, power_w: float = 1e-9) -> CarrierPlan:
    c = scn.section("carriers")
    return CarrierPlan.uniform(c["f_c_hz"], c["delta_f_hz"], c["n"], power_w)


def mfc_layouts(scn: Scenario):
    """IFs of the non-uniform and uniform comb designs for the carrier plan.

    Returns ``(nonuniform_ifs, uniform_ifs, uniform_b)``.
    """
    m = scn.section("mfc")
    carriers = carrier_plan(scn)
    _, nu = design_nonuniform(carriers, band_budget(scn), m["delta_hz"])
    origin = scn.section("carriers")["f_c_hz"] + m["uniform_origin_offset_hz"]
    rate = m["uniform_rates_hz"][0]
    comb = uniform_comb_for(carriers, rate, 1.0, origin)
    um = if_assignment(carriers, comb)
    if np.any(np.abs(um.delta_f_hz) > m["if_max_hz"]):
        raise McraqrError("uniform comb leaves a carrier outside the IF band")
    return nu.delta_f_hz, um.delta_f_hz, comb.b


def rolloffs(scn: Scenario) -> dict[str, RollOff]:
    ro = scn.task["rolloff"]
    curves = {"nonuniform": RollOff(ro["nonuniform_3db_hz"]),
              "uniform": RollOff(ro["uniform_3db_hz"]),
              "single_lo": RollOff(ro["single_lo_3db_hz"])}
    if ro["table_csv"] is not None:
        path = Path(ro["table_csv"])
        try:
            t = read_table(path)
            bw = tuple(float(v) for v in t.column("bandwidth"))
            pw = tuple(float(v) for v in t.column("power_norm"))
        except (OSError, ValueError) as exc:
            raise SchemaError(f"cannot use roll-off table: {exc}", path="task.rolloff.table_csv")
        curves["single_lo"] = RollOff(table_bw_hz=bw, table_factor=pw)
    return curves


def _meta(scn: Scenario) -> dict:
    return provenance(scn.content_hash(), scn.seed)


def _map(executor, fn, items):
    items = list(items)
    return list(executor.map(fn, items)) if executor else [fn(x) for x in items]


def _require(scn: Scenario, kind: str, command: str):
    if scn.kind != kind:
        raise SchemaError(f"{command} needs a '{kind}' task, got '{scn.kind}'", path="task.kind")


# --------------------------------------------------------------------------
# validation experiments


def validate_envelope(scn: Scenario, executor=None) -> list[ResultTable]:
    """Envelope approximation error versus power ratio and comb repetition rate."""
    _require(scn, "validation", "validate-envelope")
    task, meta = scn.task, _meta(scn)
    f_c = scn.section("carriers")["f_c_hz"]
    n, delta = scn.section("carriers")["n"], scn.section("mfc")["delta_hz"]

    def by_ratio(ratio):
        carriers, comb = ladder_fixture(f_c, n, delta, ratio, scn.seed)
        return approximation_error(carriers, comb, if_assignment(carriers, comb)).rel_rms_error

    t1 = ResultTable("envelope_power_ratio", [("power_ratio", "1"), ("rel_rms_error", "1")],
                     meta=meta)
    for r, e in zip(task["envelope_power_ratios"], _map(executor, by_ratio,
                                                          task["envelope_power_ratios"])):
        t1.add(r, e)

    offsets = task["envelope_carrier_offsets_hz"]
    phases = substream(scn.seed, "envelope/phases", 1).uniform(0, 2 * np.pi, len(offsets))
    carriers = CarrierPlan(tuple(Carrier(f_c + off, task["envelope_carrier_power_w"], float(ph))
                                 for off, ph in zip(offsets, phases)))
    bw = task["envelope_bandwidth_hz"]

    def by_rate(rate):
        comb = uniform_comb_for(carriers, rate, 1.0, f_c)
        err = approximation_error(carriers, comb, if_assignment(carriers, comb),
                                  window=task["envelope_window_s"], bandwidth_hz=bw)
        return comb.b, err.rel_rms_error

    t2 = ResultTable("envelope_rate", [("rate", "Hz"), ("comb_lines", "1"),
                                        ("rel_rms_error", "1"), ("bandwidth_3db", "Hz")], meta=meta)
    for rate, (b, e) in zip(task["envelope_rates_hz"], _map(executor, by_rate,
                                                             task["envelope_rates_hz"])):
        t2.add(rate, b, e, bw)
    return [t1, t2]


def bandwidth_layouts(scn: Scenario) -> list[IfLayout]:
    nu, un, _ = mfc_layouts(scn)
    return [IfLayout("nonuniform", tuple(float(f) for f in nu)),
            IfLayout("uniform", tuple(float(f) for f in un)),
            single_lo_layout()]


def bandwidth_sweep_experiment(scn: Scenario, executor=None) -> list[ResultTable]:
    """Transient extracted-signal power versus total bandwidth for the three IF layouts."""
    _require(scn, "validation", "bandwidth-sweep")
    task, meta = scn.task, _meta(scn)
    rx = build_receiver(scn)
    n = scn.section("carriers")["n"]
    layouts = bandwidth_layouts(scn)

    def run(layout):
        pts = bandwidth_sweep(rx.sys, rx.omega_y, rx.probe, rx.det, layout,
                              task["sweep_bandwidths_hz"], n, task["sweep_symbols"],
                              substream(scn.seed, "bandwidth-sweep/symbols", 0),
                              rel_amplitude=task["sweep_rel_amplitude"])
        return pts, normalized_curve(pts)

    tables = []
    summary = ResultTable("bandwidth_3db", [("scheme", "-"), ("bandwidth_3db", "Hz")], meta=meta)
    for layout, (pts, (bw, norm, f3)) in zip(layouts, _map(executor, run, layouts)):
        t = ResultTable(f"bandwidth_{layout.name}", [("bandwidth", "Hz"),
                                                     ("power_rel_static", "1"),
                                                     ("power_norm", "1")], meta=meta)
        for p, b, v in zip(pts, bw, norm):
            t.add(float(b), p.power, float(v))
        tables.append(t)
        summary.add(layout.name, f3)
    return tables + [summary]


KAPPA_GRIDS_HZ = {
    "large": {"delta_a_hz": (0.0, 50e6, 201), "omega_a_hz": (0.5e6, 20e6, 79),
              "omega_y_hz": (0.5e6, 20e6, 79)},
    "small": {"delta_a_hz": (0.0, 0.2e6, 41), "omega_a_hz": (0.5e6, 10e6, 39),
              "omega_y_hz": (0.5e6, 10e6, 39)},
}
SURFACE_AXES = {"large": ("delta_a_hz", "omega_a_hz"), "small": ("delta_a_hz", "omega_y_hz")}


def _kappa(rx: Receiver, regime: dict, b: int = 1) -> float:
    return rx.with_regime(regime).rho(b)


def kappa_sweep(scn: Scenario, executor=None) -> list[ResultTable]:
    """|kappa| cuts and surfaces over the comb-line detuning, Rabi frequencies and B."""
    _require(scn, "validation", "kappa-sweep")
    task, meta = scn.task, _meta(scn)
    rx = build_receiver(scn)
    tables = []
    for name in ("large", "small"):
        base = task[f"kappa_{name}"]
        for key, (lo, hi, num) in KAPPA_GRIDS_HZ[name].items():
            col = key[:-3]
            t = ResultTable(f"kappa_{name}_{col}", [(col, "Hz"), ("kappa_abs", "A/W^0.5")],
                            meta=meta)
            grid = np.linspace(lo, hi, num)
            for v, k in zip(grid, _map(executor, lambda v: _kappa(rx, {**base, key: float(v)}),
                                       grid)):
                t.add(float(v), k)
            tables.append(t)
        ka, kb = SURFACE_AXES[name]
        ga = np.linspace(*KAPPA_GRIDS_HZ[name][ka][:2], 41)
        gb = np.linspace(*KAPPA_GRIDS_HZ[name][kb][:2], 40)
        pairs = [(float(x), float(y)) for x in ga for y in gb]
        t = ResultTable(f"kappa_{name}_surface", [(ka[:-3], "Hz"), (kb[:-3], "Hz"),
                                                  ("kappa_abs", "A/W^0.5")], meta=meta)
        vals = _map(executor, lambda p: _kappa(rx, {**base, ka: p[0], kb: p[1]}), pairs)
        for (x, y), k in zip(pairs, vals):
            t.add(x, y, k)
        tables.append(t)
    t = ResultTable("kappa_comb_lines", [("comb_lines", "1"), ("kappa_large", "A/W^0.5"),
                                         ("kappa_small", "A/W^0.5")], meta=meta)
    for b in task["kappa_comb_lines"]:
        t.add(b, _kappa(rx, task["kappa_large"], b), _kappa(rx, task["kappa_small"], b))
    tables.append(t)
    return tables


def oracle_suite(scn: Scenario, executor=None) -> tuple[list[ResultTable], bool]:
    """Every cross-check; returns the table and whether all passed."""
    _require(scn, "validation", "oracle-suite")
    task, seed = scn.task, scn.seed
    rx = build_receiver(scn)
    car = scn.section("carriers")
    m = scn.section("mfc")
    rho = rx.rho(car["n"])
    noise = rx.noise(car["n"], 1e6)
    p_bar = 1e-14
    jobs = [
        lambda: steady_state_check(rx.sys, rx.omega_y, task["oracle_draws"], seed),
        lambda: slope_check(rx.sys, rx.omega_y, rx.probe, rx.det),
        lambda: kappa_constant_check(rx.sys, rx.omega_y, rx.probe, rx.det, rx.length_m),
        lambda: crb_fim_check(50, seed),
        lambda: crb_equal_gain_check(50, seed),
        lambda: partials_check(20, seed),
        lambda: snr_check(rho, noise, p_bar, scn.section("array")["n_sensors"], 100000, seed,
                          car["f_c_hz"]),
        lambda: envelope_check(car["f_c_hz"], car["n"], m["delta_hz"], 1e-6, seed),
        lambda: mfc_checks(band_budget(scn), car["f_c_hz"], m["delta_hz"], car["delta_f_hz"],
                           car["n"]),
    ]
    results: list[CheckResult] = []
    for r in _map(executor, lambda f: f(), jobs):
        results.extend(r if isinstance(r, list) else [r])
    t = ResultTable("oracle_suite", [("check", "-"), ("value", "1"), ("tolerance", "1"),
                                     ("passed", "-")], meta=_meta(scn))
    for r in results:
        t.add(r.name, float(r.value), float(r.tolerance), r.passed)
    return [t], all(r.passed for r in results)


# --------------------------------------------------------------------------
# communication


def free_space_beta(f_c_hz: float) -> float:
    """Large-scale gain (lambda / 4 pi)^2 so that beta / r^2 is the Friis path gain."""
    return (SPEED_OF_LIGHT / f_c_hz / (4 * math.pi)) ** 2


def receiver_variants(scn: Scenario) -> list[ReceiverVariant]:
    """Non-uniform MFC, uniform MFC, single-LO RAQR and the conventional antenna."""
    rx = build_receiver(scn)
    n = scn.section("carriers")["n"]
    _, _, uniform_b = mfc_layouts(scn)
    curves = rolloffs(scn)

    def density(b, itn_only=False):
        nz = rx.noise(b, 1.0)
        return nz.itn if itn_only else nz.qpn + nz.psn + nz.itn

    return [
        ReceiverVariant("nonuniform", rx.rho(n) ** 2, density(n), curves["nonuniform"]),
        ReceiverVariant("uniform", rx.rho(uniform_b) ** 2, density(uniform_b), curves["uniform"]),
        ReceiverVariant("single_lo", rx.rho(1) ** 2, density(1), curves["single_lo"]),
        ReceiverVariant("antenna", 1.0, density(1, itn_only=True), None),
    ]


def capacity_experiment(scn: Scenario, executor=None) -> list[ResultTable]:
    """Capacity versus total bandwidth for the four receivers, plus an SNR cross-check."""
    _require(scn, "comms", "capacity")
    task, meta = scn.task, _meta(scn)
    car = scn.section("carriers")
    n, m = car["n"], scn.section("array")["n_sensors"]
    beta = task["beta"] if task["beta"] is not None else free_space_beta(car["f_c_hz"])
    p_bar = task["tx_power_w"] * beta / task["distance_m"] ** 2
    bws = task["bandwidths_hz"]
    variants = receiver_variants(scn)
    curves = _map(executor, lambda v: capacity_curve(v, bws, n, p_bar, m), variants)
    t = ResultTable("capacity", [("bandwidth", "Hz")] + [(v.name, "bit/s") for v in variants],
                    meta=meta)
    for j, w in enumerate(bws):
        t.add(w, *(float(c[j]) for c in curves))

    # symbol-level check of the closed-form SNR for the non-uniform receiver
    rx = build_receiver(scn)
    array = _array(scn, m)
    nu, _, _ = mfc_layouts(scn)
    b_i = bws[0] / n
    scn_c = CommScenario(tuple(User(beta, task["distance_m"], task["aoa_rad"]) for _ in range(n)),
                         task["tx_power_w"], (b_i,) * n, tuple(float(f) for f in nu),
                         task["qam_order"])
    rho = rx.rho(n)
    noise = rx.noise(n, b_i)
    chk = ResultTable("capacity_snr_check", [("carrier", "1"), ("snr_closed_form", "1"),
                                             ("snr_monte_carlo", "1"), ("rel_error", "1")],
                      meta=meta)

    def one(i):
        closed = mrc_snr(scn_c, array, rho, noise, i)
        mc = monte_carlo_snr(scn_c, array, rho, noise, i, task["mc_symbols"],
                             substream(scn.seed, "capacity/snr", i))
        return closed, mc

    for i, (closed, mc) in enumerate(_map(executor, one, range(n))):
        chk.add(i, closed, mc, abs(mc - closed) / closed)
    return [t, chk]


# --------------------------------------------------------------------------
# sensing


def _array(scn: Scenario, m: int) -> LinearArray:
    d = scn.section("array")["spacing_m"]
    f_c = scn.section("carriers")["f_c_hz"]
    return LinearArray.half_wavelength(m, f_c) if d is None else LinearArray(m, d)


def sensing_targets(scn: Scenario, amplitude_scale: float = 1.0) -> list[Target]:
    return [Target(t["aoa_rad"], t["range_m"],
                   amplitude_scale * math.sqrt(t["echo_power_w"]) * complex(
                       math.cos(t["phase_rad"]), math.sin(t["phase_rad"])))
            for t in scn.task["targets"]]


def sensing_grid(scn: Scenario, n: int) -> SensingGrid:
    task = scn.task
    return SensingGrid(scn.section("carriers")["f_c_hz"], task["delta_f_hz"], n,
                       task["aoa_step_rad"], task["range_step_m"])


@dataclass(frozen=True)
class SensingVariant:
    """Gain, noise variance and echo power scaling of one receiver in a sensing run."""

    name: str
    kappa: float
    noise_var: float
    rolloff: RollOff | None

    def amplitude_scale(self, total_bw_hz: float) -> float:
        return 1.0 if self.rolloff is None else math.sqrt(float(self.rolloff.factor(total_bw_hz)))


SENSING_VARIANTS = ("mc_raqr", "single_lo", "antenna")


def sensing_variant(scn: Scenario, name: str, n: int) -> SensingVariant:
    """MC-RAQR uses one comb line per carrier (B = N); single-LO uses B = 1."""
    rx = build_receiver(scn)
    bw = scn.task["noise_bandwidth_hz"]
    curves = rolloffs(scn)
    if name == "mc_raqr":
        return SensingVariant(name, rx.rho(n), rx.noise(n, bw).total, curves["nonuniform"])
    if name == "single_lo":
        return SensingVariant(name, rx.rho(1), rx.noise(1, bw).total, curves["single_lo"])
    if name == "antenna":
        return SensingVariant(name, 1.0, 0.5 * rx.noise(1, bw).itn, None)
    raise ValueError(f"unknown sensing variant {name!r}")


def sensing_point(scn: Scenario, variant: str, m: int, n: int, experiment: str,
                  executor=None):
    """Monte Carlo MSE of one receiver variant at M sensors and N carriers."""
    task = scn.task
    v = sensing_variant(scn, variant, n)
    grid = sensing_grid(scn, n)
    targets = sensing_targets(scn, v.amplitude_scale(n * task["delta_f_hz"]))
    key = f"{experiment}/{variant}/M={m}/N={n}"
    return monte_carlo_mse(targets, grid, _array(scn, m), v.kappa, v.noise_var,
                           task["snapshots"], task["trials"],
                           lambda t: substream(scn.seed, key, t), task["beamformer"], executor)


def _sensing_table(scn, name, axis, axis_name, unit, experiment, mse_index, crb_index,
                   variants, executor):
    n0 = scn.task["n_carriers"]
    m0 = scn.section("array")["n_sensors"]
    cols = [(axis_name, "1")] + [(f"mse_{v}", unit) for v in variants] + [("crb", unit)]
    cols += [(f"se_{v}", unit) for v in variants]
    t = ResultTable(name, cols, meta=_meta(scn))
    for x in axis:
        m, n = (x, n0) if axis_name == "M" else (m0, x)
        res = {v: sensing_point(scn, v, m, n, experiment, executor) for v in variants}
        ref = res.get("mc_raqr") or next(iter(res.values()))
        t.add(x, *(res[v].mean()[mse_index] for v in variants), ref.mean()[crb_index],
              *(float(np.mean(res[v].se_theta if mse_index == 0 else res[v].se_r))
                for v in variants))
    return t


def sense_aoa(scn: Scenario, executor=None, variants=SENSING_VARIANTS) -> list[ResultTable]:
    """Mean AoA MSE over targets versus the number of sensors, with the MC-RAQR CRB."""
    _require(scn, "sensing", "sense-aoa")
    return [_sensing_table(scn, "sense_aoa", scn.task["m_sweep"], "M", "rad^2", "sense-aoa",
                           0, 2, variants, executor)]


def sense_range(scn: Scenario, executor=None, variants=SENSING_VARIANTS) -> list[ResultTable]:
    """Mean range MSE over targets versus the number of carriers, with the MC-RAQR CRB."""
    _require(scn, "sensing", "sense-range")
    return [_sensing_table(scn, "sense_range", scn.task["n_sweep"], "N", "m^2", "sense-range",
                           1, 3, variants, executor)]


def crb_for(scn: Scenario, variant: str, m: int, n: int):
    """Closed-form CRBs of each target for one receiver variant."""
    v = sensing_variant(scn, variant, n)
    grid = sensing_grid(scn, n)
    targets = sensing_targets(scn, v.amplitude_scale(n * scn.task["delta_f_hz"]))
    return [crb_closed_form(t, grid, _array(scn, m), v.kappa, v.noise_var, scn.task["snapshots"])
            for t in targets]


COMMANDS = {
    "validate-envelope": validate_envelope,
    "bandwidth-sweep": bandwidth_sweep_experiment,
    "kappa-sweep": kappa_sweep,
    "capacity": capacity_experiment,
    "sense-aoa": sense_aoa,
    "sense-range": sense_range,
}
