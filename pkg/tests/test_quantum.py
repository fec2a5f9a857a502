import math

import numpy as np
import pytest

from mcraqr.errors import SingularSystem, StepTooLarge
from mcraqr.oracles import random_atomic_system
from mcraqr.quantum import (GROUND_STATE, AtomicSystem, build_hamiltonian, check_density_matrix,
                            liouvillian, master_rhs, rho21_closed_form, steady_state_numeric,
                            susceptibility, transient_integrate)
from mcraqr.rng import substream

TWO_PI = 2 * math.pi


def test_hamiltonian_is_hermitian(large_detuning):
    h = build_hamiltonian(large_detuning, TWO_PI * 5e6)
    assert np.allclose(h, h.conj().T)


def test_liouvillian_matches_master_equation(large_detuning):
    rng = np.random.default_rng(1)
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    oz = TWO_PI * 5e6
    lhs = liouvillian(large_detuning, oz) @ rho.ravel() * large_detuning.gamma_2
    assert np.allclose(lhs, master_rhs(large_detuning, oz, rho).ravel(), rtol=1e-12, atol=1e-3)


def test_steady_state_is_a_density_matrix(large_detuning):
    rho = steady_state_numeric(large_detuning, TWO_PI * 5e6)
    check_density_matrix(rho)
    assert np.linalg.norm(master_rhs(large_detuning, TWO_PI * 5e6, rho)) < 1e-3


def test_closed_form_matches_null_space_at_default(large_detuning):
    oz = TWO_PI * 5e6
    cf = rho21_closed_form(large_detuning, oz)
    num = steady_state_numeric(large_detuning, oz)[1, 0]
    assert abs(cf - num) / abs(num) < 1e-6


@pytest.mark.parametrize("k", range(10))
def test_closed_form_matches_null_space_random(k, large_detuning):
    sys, oz = random_atomic_system(substream(5, "test/steady", k), large_detuning)
    num = steady_state_numeric(sys, oz)[1, 0]
    assert abs(rho21_closed_form(sys, oz) - num) / abs(num) < 1e-6


def test_closed_form_is_vectorized(large_detuning):
    oz = TWO_PI * np.array([1e6, 5e6, 9e6])
    vals = rho21_closed_form(large_detuning, oz)
    assert vals.shape == (3,)
    assert vals[1] == pytest.approx(rho21_closed_form(large_detuning, oz[1]))


def test_closed_form_requires_resonant_probe(large_detuning):
    with pytest.raises(ValueError):
        rho21_closed_form(large_detuning.with_(delta_p=1.0), 1.0)


def test_two_level_saturation():
    # coupling laser off: a driven two-level atom keeps part of its population excited
    sys = AtomicSystem.from_hz(10e6, 0.0)
    rho = steady_state_numeric(sys, 1.0)
    assert 0 < rho[1, 1].real < 0.5
    assert abs(rho[1, 0]) > 0.1


def test_cut_ladder_leaves_upper_levels_empty():
    sys = AtomicSystem.from_hz(10e6, 5.04e6, 0.0)
    rho = steady_state_numeric(sys, TWO_PI * 5e6)
    assert np.allclose(rho[3:, :], 0) and np.allclose(rho[:, 3:], 0)
    check_density_matrix(rho)


def test_susceptibility_derivative_matches_finite_difference(large_detuning):
    oz = TWO_PI * 5e6
    h = oz * 1e-6
    fd = (susceptibility(large_detuning, oz + h).chi - susceptibility(large_detuning, oz - h).chi) / (2 * h)
    an = susceptibility(large_detuning, oz).chi_prime
    assert abs(an - fd) / abs(an) < 1e-6


def test_check_density_matrix_rejects_bad_trace():
    with pytest.raises(ValueError):
        check_density_matrix(2 * GROUND_STATE)


def test_transient_relaxes_to_steady_state():
    # two-level case: relaxation at the gamma_2 scale, no slow dark-state modes
    sys = AtomicSystem.from_hz(10e6, 0.0)
    t = np.linspace(0, 2e-6, 201)
    rho = transient_integrate(sys, np.ones(t.size), t)
    assert abs(np.trace(rho[-1]) - 1) < 1e-9
    check_density_matrix(rho[-1], tol=1e-9)
    assert abs(rho[-1][1, 0] - steady_state_numeric(sys, 1.0)[1, 0]) < 1e-8


def test_transient_stays_at_steady_state(large_detuning):
    oz = TWO_PI * 5e6
    ss = steady_state_numeric(large_detuning, oz)
    t = np.linspace(0, 1e-6, 101)
    rho = transient_integrate(large_detuning, np.full(t.size, oz), t, rho0=ss)
    assert np.max(np.abs(rho[-1] - ss)) < 1e-8


def test_transient_rejects_undersampled_envelope(large_detuning):
    t = np.linspace(0, 1e-6, 11)
    with pytest.raises(ValueError):
        transient_integrate(large_detuning, np.full(t.size, 1e7), t, min_period=1e-6)


def test_transient_rejects_unstable_step(large_detuning):
    t = np.linspace(0, 1e-6, 3)
    with pytest.raises(StepTooLarge):
        transient_integrate(large_detuning, np.full(t.size, TWO_PI * 5e6), t, step=1e-6)


def test_from_hz_converts_to_angular():
    sys = AtomicSystem.from_hz(1.0, 2.0)
    assert sys.omega_p == pytest.approx(TWO_PI)
    assert sys.gamma_2 == pytest.approx(TWO_PI * 5.2e6)


def test_negative_rabi_rejected():
    with pytest.raises(ValueError):
        AtomicSystem(omega_p=-1.0, omega_c=1.0)
