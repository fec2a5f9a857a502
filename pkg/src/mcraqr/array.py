"""Uniform linear array of vapor-cell sensors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import c as SPEED_OF_LIGHT


@dataclass(frozen=True)
class LinearArray:
    """M sensors spaced ``spacing_m`` apart; sensor index m runs 1..M."""

    n_sensors: int
    spacing_m: float

    def __post_init__(self):
        if self.n_sensors < 1:
            raise ValueError("need at least one sensor")
        if self.spacing_m <= 0:
            raise ValueError("sensor spacing must be positive")

    @classmethod
    def half_wavelength(cls, n_sensors: int, freq_hz: float) -> "LinearArray":
        return cls(n_sensors, SPEED_OF_LIGHT / freq_hz / 2.0)

    @property
    def index(self) -> np.ndarray:
        return np.arange(1, self.n_sensors + 1)

    def steering(self, theta, wavelength: float) -> np.ndarray:
        """[a(theta)]_m = exp(-j 2pi/lambda m d sin theta); shape (M,) or (M, len(theta))."""
        th = np.asarray(theta, dtype=float)
        phase = -2j * np.pi / wavelength * self.spacing_m * np.multiply.outer(self.index, np.sin(th))
        return np.exp(phase)
