import math

import numpy as np
import pytest

from mcraqr import experiments as ex
from mcraqr.scenario import from_dict

TWO_PI = 2 * math.pi


def test_receiver_from_defaults():
    rx = ex.build_receiver(from_dict({"task": {"kind": "comms"}}))
    assert rx.det.lna_gain == pytest.approx(1000.0)
    assert rx.sys.cell_length == 0.10
    assert rx.omega_y == pytest.approx(TWO_PI * 5e6)
    assert rx.length_m == pytest.approx(0.2)
    assert rx.rho(4) == pytest.approx(rx.rho(1) / 2)


def test_mfc_layouts():
    nu, un, b = ex.mfc_layouts(from_dict({"task": {"kind": "comms"}}))
    assert np.abs(nu).tolist() == pytest.approx([0.5e6 * (i + 1) for i in range(10)])
    assert np.all(np.abs(un) <= 5e6) and b == 11
    assert len(set(np.round(np.abs(un)))) == 10


def test_capacity_ordering_and_snr_check():
    t, chk = ex.capacity_experiment(from_dict({"task": {"kind": "comms", "mc_symbols": 20000}}))
    cap = {c: np.array(t.column(c)) for c, _ in t.columns}
    assert np.all(cap["nonuniform"] >= cap["uniform"])
    assert np.all(cap["antenna"] < cap["uniform"])
    assert max(chk.column("rel_error")) < 0.05


def test_single_lo_approaches_comb_receivers_at_narrow_bandwidth():
    t, _ = ex.capacity_experiment(from_dict({"task": {"kind": "comms", "mc_symbols": 1000,
                                                      "bandwidths_hz": [1e4, 1e7]}}))
    nu, lo = t.column("nonuniform"), t.column("single_lo")
    assert lo[0] >= nu[0]          # single LO has the larger gain while inside its bandwidth
    assert lo[1] < nu[1]


def test_sensing_variants_order_snr():
    scn = from_dict({"task": {"kind": "sensing"}})
    snr = {}
    for v in ex.SENSING_VARIANTS:
        sv = ex.sensing_variant(scn, v, 25)
        snr[v] = sv.kappa ** 2 * sv.amplitude_scale(25 * 200e3) ** 2 / sv.noise_var
    assert snr["mc_raqr"] > snr["single_lo"] and snr["mc_raqr"] > snr["antenna"]


def test_sense_aoa_table_columns():
    scn = from_dict({"task": {"kind": "sensing", "trials": 3, "m_sweep": [20]}})
    t = ex.sense_aoa(scn)[0]
    names = [c for c, _ in t.columns]
    assert names[:5] == ["M", "mse_mc_raqr", "mse_single_lo", "mse_antenna", "crb"]
    assert len(t.rows) == 1


def test_wrong_kind_rejected():
    from mcraqr.errors import SchemaError

    with pytest.raises(SchemaError):
        ex.sense_range(from_dict({"task": {"kind": "comms"}}))
