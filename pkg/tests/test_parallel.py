"""Tests for lrd_prediction.parallel module."""

import pytest
from unittest.mock import patch, MagicMock


@pytest.fixture(autouse=True)
def reset_cap():
    """Restore the default worker cap after each test."""
    from lrd_prediction.parallel import set_thread_cap
    yield
    set_thread_cap(None)


class TestLoadSnapshot:
    """Tests for load probing."""

    def test_snapshot(self, mock_psutil):
        """Test the snapshot reads psutil."""
        from lrd_prediction.parallel import load_snapshot
        snapshot = load_snapshot()
        assert snapshot.cpu_percent == 25.0
        assert snapshot.memory_percent == 50.0
        assert snapshot.load_1m == 1.5
        assert snapshot.memory_pressure is False

    def test_snapshot_to_dict(self, mock_psutil):
        """Test rounding in to_dict."""
        from lrd_prediction.parallel import load_snapshot
        data = load_snapshot().to_dict()
        assert data["load_1m"] == 1.5
        assert data["cpu_count"] >= 1

    def test_load_unavailable(self):
        """Test a missing load average falls back to an idle snapshot."""
        from lrd_prediction.parallel import load_snapshot
        with patch("psutil.cpu_percent", return_value=10.0), \
             patch("psutil.virtual_memory") as mock_mem, \
             patch("psutil.getloadavg", side_effect=OSError("no loadavg")):
            mock_mem.return_value = MagicMock(percent=40.0)
            snapshot = load_snapshot()
        assert snapshot.load_1m == 0.0
        assert snapshot.cpu_percent == 0.0


class TestWorkers:
    """Tests for worker sizing."""

    def test_environment_default(self):
        """Test LRD_THREADS sizes the pool."""
        from lrd_prediction.parallel import default_workers
        assert default_workers() == 2

    def test_explicit_cap(self):
        """Test set_thread_cap overrides the environment."""
        from lrd_prediction.parallel import default_workers, set_thread_cap
        set_thread_cap(3)
        assert default_workers() == 3

    def test_load_based(self, mock_psutil):
        """Test a zero cap sizes from idle cores."""
        from lrd_prediction.parallel import default_workers, set_thread_cap
        set_thread_cap(0)
        with patch("os.cpu_count", return_value=4):
            assert default_workers() == 2

    def test_memory_pressure(self):
        """Test memory pressure forces a single worker."""
        from lrd_prediction.parallel import default_workers, set_thread_cap
        set_thread_cap(0)
        with patch("psutil.cpu_percent", return_value=5.0), \
             patch("psutil.virtual_memory") as mock_mem, \
             patch("psutil.getloadavg", return_value=(0.1, 0.1, 0.1)):
            mock_mem.return_value = MagicMock(percent=95.0)
            assert default_workers() == 1

    def test_rejects_negative(self):
        """Test the cap must be nonnegative."""
        from lrd_prediction.parallel import set_thread_cap
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError):
            set_thread_cap(-1)


class TestOrderedMap:
    """Tests for ordered_map."""

    def test_preserves_order(self):
        """Test results follow input order."""
        import time
        from lrd_prediction.parallel import ordered_map
        result = ordered_map(lambda x: (time.sleep(0.01 * (5 - x)), x * x)[1], range(6), workers=4)
        assert result == [0, 1, 4, 9, 16, 25]

    def test_empty(self):
        """Test an empty input."""
        from lrd_prediction.parallel import ordered_map
        assert ordered_map(lambda x: x, []) == []

    def test_single_worker(self):
        """Test the serial path."""
        from lrd_prediction.parallel import ordered_map
        assert ordered_map(str, [1, 2], workers=1) == ["1", "2"]

    def test_exception_propagates(self):
        """Test the first failure is raised."""
        from lrd_prediction.parallel import ordered_map

        def fail(x):
            if x == 2:
                raise ValueError("boom")
            return x

        with pytest.raises(ValueError, match="boom"):
            ordered_map(fail, range(4), workers=2)
