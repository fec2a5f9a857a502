import math

import numpy as np
import pytest

from mcraqr.bandwidth import IfLayout, bandwidth_sweep, normalized_curve, simulate_point, single_lo_layout
from mcraqr.rng import substream

TWO_PI = 2 * math.pi


def test_single_lo_layout_scales_with_bandwidth():
    lay = single_lo_layout()
    assert lay.ifs(10e6, 5).tolist() == pytest.approx([2e6, 4e6, 6e6, 8e6, 10e6])


def test_fixed_layout_checks_length():
    with pytest.raises(ValueError):
        IfLayout("x", (1e6, 2e6)).ifs(1e6, 3)


def test_sweep_is_deterministic(large_detuning, probe, det):
    lay = IfLayout("fixed", (0.5e6, 1.0e6))
    a = bandwidth_sweep(large_detuning, TWO_PI * 5e6, probe, det, lay, [2e6, 4e6], 2, 4,
                        substream(0, "bw", 1))
    b = bandwidth_sweep(large_detuning, TWO_PI * 5e6, probe, det, lay, [2e6, 4e6], 2, 4,
                        substream(0, "bw", 1))
    assert [p.power for p in a] == [p.power for p in b]
    bw, norm, f3 = normalized_curve(a)
    assert norm[0] == 1.0 and bw.tolist() == [2e6, 4e6]


def test_extracted_gain_is_linear_in_drive(large_detuning, probe, det):
    lay = IfLayout("fixed", (0.5e6, 1.0e6))
    kw = dict(bandwidths_hz=[2e6], n_carriers=2, n_symbols=4)
    a = bandwidth_sweep(large_detuning, TWO_PI * 5e6, probe, det, lay, rng=substream(0, "bw", 2),
                        rel_amplitude=1e-4, **kw)
    b = bandwidth_sweep(large_detuning, TWO_PI * 5e6, probe, det, lay, rng=substream(0, "bw", 2),
                        rel_amplitude=2e-4, **kw)
    assert b[0].power == pytest.approx(a[0].power, rel=1e-2)
