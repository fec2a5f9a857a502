"""Scenario files: JSON with unit-suffixed keys, defaults, validation and hashing.

Every physical quantity carries its unit in the key name (``_hz`` for
ordinary frequencies interpreted as Omega/2pi, ``_w``, ``_m``, ``_rad``,
``_k``, ...).  Loading fills every omitted field with its default, so a
saved scenario is fully explicit and a save/load round trip is the identity.
"""
from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import SchemaError, UnitError

SCHEMA_VERSION = 1

UNIT_SUFFIXES = ("_hz", "_w", "_m", "_m2", "_m3", "_per_m3", "_rad", "_k", "_s", "_db", "_ea0")

# field kinds: float, int, bool, str:<a|b>, floats, ints, float? (nullable), dict, targets


class _F:
    __slots__ = ("kind", "default")

    def __init__(self, kind, default):
        self.kind = kind
        self.default = default


ATOMIC = {
    "omega_p_hz": _F("float", 10e6),
    "omega_c_hz": _F("float", 5.04e6),
    "omega_a_hz": _F("float", 7e6),
    "delta_c_hz": _F("float", 0.1e6),
    "delta_a_hz": _F("float", 25e6),
    "delta_x_hz": _F("float", -25e6),
    "gamma_2_hz": _F("float", 5.2e6),
    "mu_12_ea0": _F("float", 3.1729),
    "mu_45_ea0": _F("float", 1275.23),
    "n_atoms_per_m3": _F("float", 4.89e16),
    "cell_length_m": _F("float", 0.10),
    "probe_wavelength_m": _F("float", 852.347e-9),
}

PROBE = {
    "power_w": _F("float", 3.8e-6),
    "fwhm_m": _F("float", 1.7e-3),
    "phase_rad": _F("float", 0.0),
}

DETECTOR = {
    "local_power_w": _F("float", 1e-3),
    "local_phase_rad": _F("float", 0.0),
    "lna_gain_db": _F("float", 30.0),
}

RECEIVER = {
    "omega_y_hz": _F("float", 5e6),
    "gain_length": _F("str:cell|spacing", "cell"),
    "spacing_m": _F("float", 5e-3),
    "aperture_m2": _F("float", 1e-4),
    "quantum_efficiency": _F("float", 1.0),
}

NOISE = {
    "temperature_k": _F("float", 300.0),
    "gamma_nat_hz": _F("float", 0.0),
    "gamma_bbr_hz": _F("float", 0.0),
    "upsilon_1": _F("float", 1.0),
    "upsilon_2_m3": _F("float", 1.0),
    "qpn_enabled": _F("bool", False),
}

ARRAY = {
    "n_sensors": _F("int", 22),
    "spacing_m": _F("float?", None),       # None: half the carrier wavelength
}

CARRIERS = {
    "f_c_hz": _F("float", 30e9),
    "delta_f_hz": _F("float", 11e6),
    "n": _F("int", 10),
}

MFC = {
    "if_max_hz": _F("float", 5e6),
    "min_if_separation_hz": _F("float", 0.1e6),
    "min_comb_spacing_hz": _F("float", 10.5e6),
    "delta_hz": _F("float", 0.5e6),
    "uniform_rates_hz": _F("floats", [11.5e6]),
    "uniform_origin_offset_hz": _F("float", 0.25e6),
}

ROLLOFF = {
    "single_lo_3db_hz": _F("float", 0.25e6),
    "nonuniform_3db_hz": _F("float", 14e6),
    "uniform_3db_hz": _F("float", 14e6),
    "table_csv": _F("str?", None),
}

REGIME = {
    "delta_c_hz": _F("float", 0.0),
    "delta_x_hz": _F("float", 0.0),
    "delta_a_hz": _F("float", 0.0),
    "omega_a_hz": _F("float", 0.0),
    "omega_y_hz": _F("float", 0.0),
}

LARGE_REGIME = {"delta_c_hz": 0.1e6, "delta_x_hz": -25e6, "delta_a_hz": 25e6, "omega_a_hz": 7e6,
                "omega_y_hz": 5e6}
SMALL_REGIME = {"delta_c_hz": 0.1e6, "delta_x_hz": -0.1e6, "delta_a_hz": 0.1e6, "omega_a_hz": 5e6,
                "omega_y_hz": 2e6}

TARGET = {
    "aoa_rad": _F("float", 0.0),
    "range_m": _F("float", 100.0),
    "echo_power_w": _F("float", 1e-12),
    "phase_rad": _F("float", 0.0),
}

FIXTURE_TARGETS = [
    {"aoa_rad": math.radians(a), "range_m": r, "echo_power_w": 1e-12, "phase_rad": 0.0}
    for a, r in ((16.1, 640.1), (19.4, 670.2), (23.5, 700.3), (26.9, 730.4))
]

TASKS = {
    "validation": {
        "oracle_draws": _F("int", 100),
        "envelope_power_ratios": _F("floats", [1e-8, 1e-6, 1e-4, 1e-2, 0.1, 0.3, 1.0]),
        "envelope_rates_hz": _F("floats", [1e6, 2e6, 3e6, 4e6, 5e6, 6e6, 8e6, 10e6, 12e6, 15e6,
                                           20e6, 30e6]),
        "envelope_bandwidth_hz": _F("float", 5e6),
        "envelope_carrier_offsets_hz": _F("floats", [1e6, 12e6, 23e6, 35e6, 46e6, 57e6, 69e6, 80e6,
                                                     91e6, 103e6]),
        "envelope_carrier_power_w": _F("float", 1e-7),
        "envelope_window_s": _F("float", 10e-6),
        "sweep_bandwidths_hz": _F("floats", [0.1e6, 0.2e6, 0.5e6, 1e6, 2e6, 5e6, 10e6, 20e6, 50e6,
                                             100e6]),
        "sweep_symbols": _F("int", 10),
        "sweep_rel_amplitude": _F("float", 1e-3),
        "kappa_large": _F("regime", LARGE_REGIME),
        "kappa_small": _F("regime", SMALL_REGIME),
        "kappa_comb_lines": _F("ints", [1, 2, 4, 8, 16, 32]),
    },
    "comms": {
        "distance_m": _F("float", 1500.0),
        "tx_power_w": _F("float", 0.01),
        "beta": _F("float?", None),            # None: free-space (lambda_c / 4 pi)^2
        "aoa_rad": _F("float", 0.0),
        "bandwidths_hz": _F("floats", [1e6, 2e6, 4e6, 6e6, 8e6, 10e6, 12e6, 14e6, 16e6, 18e6,
                                       20e6]),
        "qam_order": _F("int", 64),
        "mc_symbols": _F("int", 100000),
        "rolloff": _F("rolloff", None),
    },
    "sensing": {
        "targets": _F("targets", FIXTURE_TARGETS),
        "delta_f_hz": _F("float", 200e3),
        "n_carriers": _F("int", 25),
        "snapshots": _F("int", 64),
        "trials": _F("int", 200),
        "m_sweep": _F("ints", [8, 12, 16, 20, 24, 28, 32]),
        "n_sweep": _F("ints", [5, 10, 15, 20, 25, 30]),
        "aoa_step_rad": _F("float", math.radians(0.01)),
        "range_step_m": _F("float", 0.1),
        "noise_bandwidth_hz": _F("float", 200e3),
        "beamformer": _F("str:zf|matched", "zf"),
        "rolloff": _F("rolloff", None),
    },
}

SECTIONS = {
    "atomic": ATOMIC,
    "probe": PROBE,
    "detector": DETECTOR,
    "receiver": RECEIVER,
    "noise": NOISE,
    "array": ARRAY,
    "carriers": CARRIERS,
    "mfc": MFC,
}

_DIMENSIONLESS = {"n", "n_sensors", "n_carriers", "upsilon_1", "quantum_efficiency", "qpn_enabled",
                  "gain_length", "beta", "oracle_draws", "sweep_symbols", "sweep_rel_amplitude",
                  "kappa_comb_lines", "qam_order", "mc_symbols", "snapshots", "trials", "m_sweep",
                  "n_sweep", "beamformer", "envelope_power_ratios", "targets", "rolloff",
                  "table_csv", "kind", "kappa_large", "kappa_small"}


def _stem(key: str) -> str:
    for suf in sorted(UNIT_SUFFIXES, key=len, reverse=True):
        if key.endswith(suf):
            return key[: -len(suf)]
    parts = key.rsplit("_", 1)
    return parts[0] if len(parts) == 2 else key


def _unknown_key(key: str, schema: dict, path: str):
    """UnitError when the key names a known quantity with a wrong or missing unit."""
    for known in schema:
        if known in _DIMENSIONLESS:
            continue
        if key == _stem(known) or _stem(key) == _stem(known):
            raise UnitError(f"expected unit key {known!r}", path=f"{path}.{key}")
    raise SchemaError("unknown field", path=f"{path}.{key}")


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check(kind: str, value, path: str):
    if kind == "float?" or kind == "str?":
        if value is None:
            return None
        kind = kind[:-1]
    if kind == "float":
        if not _is_number(value) or not math.isfinite(value):
            raise SchemaError(f"expected a finite number", path=path)
        return float(value)
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaError(f"expected an integer", path=path)
        return value
    if kind == "bool":
        if not isinstance(value, bool):
            raise SchemaError(f"expected true or false", path=path)
        return value
    if kind == "str":
        if not isinstance(value, str):
            raise SchemaError(f"expected a string", path=path)
        return value
    if kind.startswith("str:"):
        choices = kind[4:].split("|")
        if value not in choices:
            raise SchemaError(f"expected one of {choices}", path=path)
        return value
    if kind in ("floats", "ints"):
        if not isinstance(value, list) or not value:
            raise SchemaError(f"expected a non-empty list", path=path)
        sub = kind[:-1]
        return [_check(sub, v, f"{path}[{n}]") for n, v in enumerate(value)]
    if kind == "regime":
        return _fill(REGIME, value, path)
    if kind == "rolloff":
        return _fill(ROLLOFF, {} if value is None else value, path)
    if kind == "targets":
        if not isinstance(value, list) or not value:
            raise SchemaError(f"expected a non-empty list of targets", path=path)
        return [_fill(TARGET, t, f"{path}[{n}]") for n, t in enumerate(value)]
    raise AssertionError(kind)


def _fill(schema: dict, given, path: str) -> dict:
    if not isinstance(given, dict):
        raise SchemaError(f"expected an object", path=path)
    for key in given:
        if key not in schema:
            _unknown_key(key, schema, path)
    out = {}
    for key, f in schema.items():
        if key in given:
            out[key] = _check(f.kind, given[key], f"{path}.{key}")
        elif f.kind == "rolloff":
            out[key] = _fill(ROLLOFF, {}, f"{path}.{key}")
        elif f.kind == "regime":
            out[key] = _fill(REGIME, f.default, f"{path}.{key}")
        else:
            out[key] = copy.deepcopy(f.default)
    return out


def _validate_values(d: dict):
    def positive(section, key):
        if not d[section][key] > 0:
            raise SchemaError(f"{section}.{key}: must be positive", path=f"{section}.{key}")

    for key in ("omega_p_hz", "omega_c_hz", "gamma_2_hz", "mu_12_ea0", "mu_45_ea0",
                "n_atoms_per_m3", "cell_length_m", "probe_wavelength_m"):
        positive("atomic", key)
    if d["atomic"]["omega_a_hz"] < 0:
        raise SchemaError("atomic.omega_a_hz: must be non-negative", path="atomic.omega_a_hz")
    for key in ("power_w", "fwhm_m"):
        positive("probe", key)
    positive("detector", "local_power_w")
    for key in ("omega_y_hz", "spacing_m", "aperture_m2", "quantum_efficiency"):
        positive("receiver", key)
    positive("array", "n_sensors")
    positive("carriers", "n")
    positive("carriers", "f_c_hz")
    positive("carriers", "delta_f_hz")
    task = d["task"]
    if task["kind"] == "comms":
        if task["distance_m"] <= 0:
            raise SchemaError("task.distance_m: must be positive", path="task.distance_m")
        if any(b <= 0 for b in task["bandwidths_hz"]):
            raise SchemaError("task.bandwidths_hz: must be positive", path="task.bandwidths_hz")
    if task["kind"] == "sensing":
        for n, t in enumerate(task["targets"]):
            if t["range_m"] <= 0:
                raise SchemaError("range must be positive", path=f"task.targets[{n}].range_m")
            if abs(t["aoa_rad"]) > math.pi / 2:
                raise SchemaError("AoA outside [-pi/2, pi/2]", path=f"task.targets[{n}].aoa_rad")


def validate(raw) -> dict:
    """Validate a parsed scenario document and return it with all defaults filled."""
    if not isinstance(raw, dict):
        raise SchemaError("scenario must be a JSON object", path="")
    allowed = set(SECTIONS) | {"task", "rng_seed", "schema_version"}
    for key in raw:
        if key not in allowed:
            raise SchemaError(f"{key}: unknown section", path=key)
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version!r}", path="schema_version")
    out = {"schema_version": SCHEMA_VERSION}
    seed = raw.get("rng_seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise SchemaError("rng_seed: expected a 64-bit non-negative integer", path="rng_seed")
    out["rng_seed"] = seed
    for name, schema in SECTIONS.items():
        out[name] = _fill(schema, raw.get(name, {}), name)
    task = raw.get("task")
    if not isinstance(task, dict) or not task:
        raise SchemaError("task: a non-empty task block is required", path="task")
    kind = task.get("kind")
    if kind not in TASKS:
        raise SchemaError(f"task.kind: expected one of {sorted(TASKS)}", path="task.kind")
    body = {k: v for k, v in task.items() if k != "kind"}
    out["task"] = {"kind": kind, **_fill(TASKS[kind], body, "task")}
    _validate_values(out)
    return out


def canonical_json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)


@dataclass(frozen=True)
class Scenario:
    """A validated scenario; ``data`` holds every field explicitly."""

    data: dict

    @property
    def task(self) -> dict:
        return self.data["task"]

    @property
    def kind(self) -> str:
        return self.data["task"]["kind"]

    @property
    def seed(self) -> int:
        return self.data["rng_seed"]

    def section(self, name: str) -> dict:
        return self.data[name]

    def content_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.data).encode("utf-8")).hexdigest()

    def with_seed(self, seed: int) -> "Scenario":
        d = copy.deepcopy(self.data)
        d["rng_seed"] = seed
        return Scenario(validate(d))

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2, allow_nan=False) + "\n"


def from_dict(raw: dict) -> Scenario:
    return Scenario(validate(copy.deepcopy(raw)))


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read scenario: {exc}", path="") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", path="") from exc
    return Scenario(validate(raw))


def save_scenario(scn: Scenario, path) -> None:
    Path(path).write_text(scn.to_json(), encoding="utf-8")
