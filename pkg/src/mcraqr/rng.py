"""Counter-based random substreams keyed by (seed, experiment, trial)."""
from __future__ import annotations

import zlib

import numpy as np


def experiment_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def substream(seed: int, experiment: str, trial: int) -> np.random.Generator:
    """Independent Philox generator for one trial; identical whatever the schedule."""
    if seed < 0 or trial < 0:
        raise ValueError("seed and trial index must be non-negative")
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, experiment_key(experiment), trial])
    return np.random.Generator(np.random.Philox(ss))
