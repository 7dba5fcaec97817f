"""Pytest configuration and fixtures for lrd-prediction tests."""

import os
import pytest
from unittest.mock import patch, MagicMock

# Set test environment variables before importing modules
os.environ.setdefault("LRD_THREADS", "2")
os.environ.setdefault("LRD_LOG_LEVEL", "WARNING")
os.environ.setdefault("LRD_QMC_LOG2_POINTS", "14")


@pytest.fixture
def mock_psutil():
    """Mock psutil for testing without actual system metrics."""
    with patch("psutil.cpu_percent", return_value=25.0), \
         patch("psutil.virtual_memory") as mock_mem, \
         patch("psutil.getloadavg", return_value=(1.5, 1.0, 0.5)):
        mock_mem.return_value = MagicMock(percent=50.0)
        yield


@pytest.fixture
def q():
    """Default quadrature configuration."""
    from lrd_prediction.config import QuadratureConfig
    return QuadratureConfig()


@pytest.fixture(scope="session")
def fbm75():
    """fBm with H = 0.75."""
    from lrd_prediction.model import fbm
    return fbm(0.75)


@pytest.fixture(scope="session")
def fbm75_ar(fbm75):
    """Closed-form AR coefficient of fBm(0.75)."""
    from lrd_prediction.duality import build_ar
    return build_ar(fbm75)


@pytest.fixture(scope="session")
def fbm75_table(fbm75, fbm75_ar):
    """Kernel table of fBm(0.75) for t2 = 2."""
    from lrd_prediction.kernels import build_kernel_table
    return build_kernel_table(fbm75, fbm75_ar, 2.0)


@pytest.fixture(scope="session")
def two_index_model():
    """Two-index model with H = 0.75, H0 = 0.6."""
    from lrd_prediction.model import two_index
    return two_index(0.75, 0.6)


@pytest.fixture(scope="session")
def two_index_ar(two_index_model):
    """Inverted AR coefficient of the two-index model."""
    from lrd_prediction.duality import build_ar
    return build_ar(two_index_model)


@pytest.fixture
def model_file(tmp_path):
    """Write a JSON model document and return its path."""
    def write(text='{"kind": "fbm", "H": 0.75}'):
        path = tmp_path / "model.json"
        path.write_text(text)
        return path
    return write
