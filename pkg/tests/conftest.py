import os
from pathlib import Path

import numpy as np
import pytest

from app.sim.run.services.profile_service import profile_service
from app.sim.spectral.models_spectral import Grid2, Grid3
from app.sim.spectral.services.spectral_service import SpectralService


# Set test environment
@pytest.fixture(autouse=True)
def setup_test_env():
    """Set up test environment variables"""
    os.environ["ENVIRONMENT"] = "test"
    yield
    # Clean up after test
    if "ENVIRONMENT" in os.environ:
        del os.environ["ENVIRONMENT"]


@pytest.fixture
def grid2():
    """32×32 grid on the 2D torus"""
    return Grid2(n=32)


@pytest.fixture
def grid3():
    """16³ grid on the 3D torus"""
    return Grid3(n=16)


@pytest.fixture
def ops2(grid2):
    return SpectralService(grid2, dealias=True, workers=1)


@pytest.fixture
def ops3(grid3):
    return SpectralService(grid3, dealias=True, workers=1)


@pytest.fixture
def smooth_field():
    """Builder for seeded band-limited fields: smooth_field(grid, seed, k_max)"""

    def build(grid, seed: int = 0, k_max: float = 3.0, amplitude: float = 1.0):
        return profile_service.random_smooth(grid, seed, k_max, amplitude)

    return build


@pytest.fixture
def write_config(tmp_path: Path):
    """Writes key=value config text to a file under tmp_path"""

    def write(text: str, name: str = "run.cfg") -> Path:
        path = tmp_path / name
        path.write_text(text)
        return path

    return write


# Helper functions for tests
def sup_gap(a: np.ndarray, b: np.ndarray) -> float:
    """Max absolute entrywise difference"""
    return float(np.max(np.abs(a - b)))
