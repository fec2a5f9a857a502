import numpy as np
import pytest

from mcraqr.rng import experiment_key, substream


def test_substreams_reproducible():
    assert substream(1, "a", 3).random() == substream(1, "a", 3).random()


def test_substreams_distinct():
    draws = {substream(s, e, t).random() for s in (0, 1) for e in ("a", "b") for t in (0, 1)}
    assert len(draws) == 8


def test_experiment_key_stable():
    assert experiment_key("sense-aoa") == experiment_key("sense-aoa")
    assert experiment_key("sense-aoa") != experiment_key("sense-range")


def test_large_seed_accepted_and_negative_rejected():
    substream(2**64 - 1, "x", 0).random()
    with pytest.raises(ValueError):
        substream(-1, "x", 0)
