import json
import math

import pytest

from mcraqr.errors import SchemaError, UnitError
from mcraqr.scenario import from_dict, load_scenario, save_scenario, validate


def _write(tmp_path, doc):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(doc))
    return p


def test_minimal_file_fills_reference_defaults(tmp_path):
    scn = load_scenario(_write(tmp_path, {"task": {"kind": "comms"}}))
    a = scn.section("atomic")
    assert a["cell_length_m"] == 0.10
    assert a["n_atoms_per_m3"] == pytest.approx(4.89e16)
    assert a["omega_p_hz"] == 10e6 and a["omega_c_hz"] == 5.04e6 and a["gamma_2_hz"] == 5.2e6
    assert scn.section("detector")["lna_gain_db"] == 30.0
    assert scn.section("carriers")["f_c_hz"] == 30e9
    assert scn.section("probe")["phase_rad"] == 0.0
    assert scn.section("detector")["local_phase_rad"] == 0.0
    assert scn.task["distance_m"] == 1500.0


def test_empty_task_block_rejected():
    with pytest.raises(SchemaError):
        validate({"task": {}})
    with pytest.raises(SchemaError):
        validate({})


def test_unknown_kind_rejected():
    with pytest.raises(SchemaError) as info:
        validate({"task": {"kind": "radar"}})
    assert info.value.path == "task.kind"


def test_round_trip_is_identity(tmp_path):
    scn = from_dict({"task": {"kind": "sensing", "trials": 7}, "rng_seed": 9})
    p = tmp_path / "out.json"
    save_scenario(scn, p)
    again = load_scenario(p)
    assert again.data == scn.data
    assert again.content_hash() == scn.content_hash()


@pytest.mark.parametrize("section,key", [("atomic", "omega_p"), ("atomic", "omega_p_mhz"),
                                         ("probe", "power"), ("atomic", "n_atoms"),
                                         ("carriers", "delta_f_ghz")])
def test_wrong_or_missing_unit_is_unit_error(section, key):
    with pytest.raises(UnitError) as info:
        validate({section: {key: 1.0}, "task": {"kind": "comms"}})
    assert info.value.path == f"{section}.{key}"


def test_unknown_field_is_schema_error():
    with pytest.raises(SchemaError) as info:
        validate({"atomic": {"colour": 1.0}, "task": {"kind": "comms"}})
    assert not isinstance(info.value, UnitError)


def test_type_errors_carry_path():
    with pytest.raises(SchemaError) as info:
        validate({"array": {"n_sensors": 2.5}, "task": {"kind": "comms"}})
    assert info.value.path == "array.n_sensors"
    with pytest.raises(SchemaError):
        validate({"task": {"kind": "comms", "bandwidths_hz": []}})
    with pytest.raises(SchemaError):
        validate({"task": {"kind": "sensing", "beamformer": "mvdr"}})


def test_value_checks():
    with pytest.raises(SchemaError):
        validate({"atomic": {"cell_length_m": -1.0}, "task": {"kind": "comms"}})
    with pytest.raises(SchemaError):
        validate({"task": {"kind": "sensing", "targets": [{"aoa_rad": 2.0}]}})


def test_nested_targets_filled():
    scn = from_dict({"task": {"kind": "sensing", "targets": [{"aoa_rad": 0.1, "range_m": 50.0}]}})
    t = scn.task["targets"][0]
    assert t["echo_power_w"] > 0 and t["phase_rad"] == 0.0


def test_hash_changes_iff_content_changes():
    a = from_dict({"task": {"kind": "comms"}})
    b = from_dict({"task": {"kind": "comms", "distance_m": 1500.0}})
    c = from_dict({"task": {"kind": "comms", "distance_m": 1000.0}})
    assert a.content_hash() == b.content_hash()
    assert a.content_hash() != c.content_hash()
    assert a.with_seed(5).content_hash() != a.content_hash()


def test_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        load_scenario(p)
    with pytest.raises(SchemaError):
        load_scenario(tmp_path / "missing.json")


def test_default_targets_are_reference_geometry():
    scn = from_dict({"task": {"kind": "sensing"}})
    aoas = [round(math.degrees(t["aoa_rad"]), 6) for t in scn.task["targets"]]
    assert aoas == [16.1, 19.4, 23.5, 26.9]
