"""Shared fixtures for the hpdiv test-suite."""

import os

# Smaller oracle defaults; must be set before hpdiv reads its configuration
os.environ.setdefault("HPDIV_ENVIRONMENT", "testing")

import numpy as np
import pytest

from hpdiv.models import LabeledPointSet


@pytest.fixture
def alternating_line():
    """X = {(0,0),(2,0)}, Y = {(1,0),(3,0)}: every MST edge crosses."""
    return LabeledPointSet.from_arrays([[0.0, 0.0], [2.0, 0.0]], [[1.0, 0.0], [3.0, 0.0]])


@pytest.fixture
def separated_clusters():
    """X = {(0,0),(1,0)}, Y = {(10,0),(11,0)}: only the bridge crosses."""
    return LabeledPointSet.from_arrays([[0.0, 0.0], [1.0, 0.0]], [[10.0, 0.0], [11.0, 0.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def uniform_sample():
    """Factory: two independent uniform samples on [0,1]^d from a generator"""

    def make(rng: np.random.Generator, m: int, n: int, d: int = 2) -> LabeledPointSet:
        return LabeledPointSet.from_arrays(rng.random((m, d)), rng.random((n, d)))

    return make
