"""Physical constants (CODATA via scipy) and unit helpers."""
from dataclasses import dataclass

import numpy as np
from scipy.constants import Boltzmann, c, e, epsilon_0, hbar, physical_constants

BOHR_RADIUS = physical_constants["Bohr radius"][0]
EA0 = e * BOHR_RADIUS  # atomic unit of dipole moment, C*m
TWO_PI = 2.0 * np.pi


def hz_to_angular(f_hz):
    return TWO_PI * np.asarray(f_hz, dtype=float) if np.ndim(f_hz) else TWO_PI * float(f_hz)


def angular_to_hz(omega):
    return np.asarray(omega, dtype=float) / TWO_PI if np.ndim(omega) else float(omega) / TWO_PI


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = hbar
    c: float = c
    epsilon_0: float = epsilon_0
    q: float = e
    k_B: float = Boltzmann
    eta: float = 1.0          # photodiode quantum efficiency
    a_e: float = 1.0e-4       # effective sensor aperture, m^2

    def __post_init__(self):
        if self.a_e <= 0:
            raise ValueError("effective aperture must be positive")
        if not 0 < self.eta <= 1:
            raise ValueError("quantum efficiency must lie in (0, 1]")


DEFAULT_CONSTANTS = PhysicalConstants()
