"""Shared pytest setup: repository root on sys.path, the slow marker, small fixtures."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from common.rng import derive_rng  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance checks (deselect with -m 'not slow')")


@pytest.fixture
def rng():
    return derive_rng(12345, "tests")


@pytest.fixture
def three_row_features():
    """Rows e1, e2 and their normalized sum; 2-subset weights are 1 : 1/2 : 1/2."""
    return np.array([[1.0, 0.0], [0.0, 1.0], [1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0)]])
