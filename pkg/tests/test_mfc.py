import numpy as np
import pytest

from mcraqr.errors import PlanInfeasible
from mcraqr.mfc import (BandBudget, design_nonuniform, design_uniform, detect_ambiguity,
                        if_assignment, uniform_comb_for)
from mcraqr.oracles import collision_carriers
from mcraqr.waveform import CarrierPlan, IfMap, MfcPlan

BUDGET = BandBudget()


def test_budget_validation():
    with pytest.raises(ValueError):
        BandBudget(5e6, 6e6, 20e6)
    with pytest.raises(ValueError):
        BandBudget(5e6, 0.1e6, 9e6)


def test_nearest_line_assignment_tie_goes_low():
    comb = MfcPlan.from_freqs([0.0, 10.0], 1.0)
    m = if_assignment(CarrierPlan.uniform(5.0, 1.0, 1, 1.0), comb)
    assert m.line_index[0] == 0 and m.delta_f_hz[0] == 5.0


def test_single_comb_has_two_collision_groups():
    carriers = collision_carriers()
    m = if_assignment(carriers, uniform_comb_for(carriers, 15e6, 1.0, 30e9))
    groups = detect_ambiguity(m, 0.1e6)
    assert len(groups) == 2
    mags = sorted({round(float(np.abs(m.delta_f_hz[g[0]])) / 1e6, 3) for g in groups})
    assert mags == [1.5, 6.5]


def test_two_comb_design_is_collision_free():
    d = design_uniform(collision_carriers(), BUDGET, [15e6, 11.9e6], 1.0, 30e9)
    assert detect_ambiguity(d.if_map, BUDGET.min_if_separation_hz) == []
    assert np.all(np.abs(d.if_map.delta_f_hz) <= 5e6)
    assert len(d.combs) == 2
    assert d.if_map.comb_index.tolist() == [1, 0, 0, 1, 1, 1, 1, 1, 1, 0]


def test_uniform_design_rejects_dense_comb():
    with pytest.raises(PlanInfeasible):
        design_uniform(collision_carriers(), BUDGET, [5e6])


def test_uniform_design_reports_unplaceable_carrier():
    carriers = CarrierPlan.uniform(30e9, 15e6, 3, 1e-9)
    with pytest.raises(PlanInfeasible) as info:
        design_uniform(carriers, BUDGET, [15e6], origin_hz=30e9)
    assert info.value.carrier_index == 0


def test_nonuniform_ladder_is_exact():
    carriers = CarrierPlan.uniform(30e9, 11e6, 10, 1e-9)
    comb, m = design_nonuniform(carriers, BUDGET, 0.5e6)
    assert comb.b == 10
    assert np.abs(m.delta_f_hz).tolist() == pytest.approx([0.5e6 * (i + 1) for i in range(10)],
                                                          abs=1e-6)
    assert detect_ambiguity(m, BUDGET.min_if_separation_hz) == []
    assert comb.min_spacing() >= BUDGET.min_comb_spacing_hz - 1e-6


def test_nonuniform_ladder_must_fit_band():
    carriers = CarrierPlan.uniform(30e9, 11e6, 12, 1e-9)
    with pytest.raises(PlanInfeasible):
        design_nonuniform(carriers, BUDGET, 0.5e6)


def test_nonuniform_flips_side_for_dense_carriers():
    carriers = CarrierPlan.uniform(30e9, 10.6e6, 3, 1e-9)
    comb, m = design_nonuniform(carriers, BUDGET, 1e6)
    assert np.all(np.diff(comb.freqs) >= BUDGET.min_comb_spacing_hz - 1e-6)
    assert np.abs(m.delta_f_hz).tolist() == pytest.approx([1e6, 2e6, 3e6])


def test_ambiguity_groups_chain():
    m = IfMap(np.arange(4), np.array([1.0, 1.05, 1.1, 3.0]), np.zeros(4))
    assert detect_ambiguity(m, 0.06) == [[0, 1, 2]]
