"""Tests for lrd_prediction.verify module."""

import math
import pytest


class TestCheckResult:
    """Tests for CheckResult."""

    def test_relative_error(self):
        """Test the error is relative to the reference."""
        from lrd_prediction.verify import CheckResult
        result = CheckResult("s", "c", 1.01, 1.0, 0.02)
        assert result.error == pytest.approx(0.01)
        assert result.passed

    def test_absolute_error_for_zero_reference(self):
        """Test residual checks compare against zero."""
        from lrd_prediction.verify import CheckResult
        result = CheckResult("s", "c", -3e-6, 0.0, 1e-5)
        assert result.error == 3e-6
        assert result.passed

    def test_nan_fails(self):
        """Test a NaN value never passes."""
        from lrd_prediction.verify import CheckResult
        assert not CheckResult("s", "c", math.nan, 1.0, 1.0).passed

    def test_row(self):
        """Test the CSV row keys."""
        from lrd_prediction.verify import CheckResult
        row = CheckResult("s", "c", 2.0, 1.0, 0.1).row()
        assert list(row) == ["suite", "check", "value", "expected", "error", "tolerance", "status"]
        assert row["status"] == "fail"

    def test_worst_point(self):
        """Test a grid comparison reports its worst point."""
        from lrd_prediction.verify import _worst
        result = _worst("s", "grid", [1.0, 2.2, 3.0], [1.0, 2.0, 3.0], 0.05)
        assert result.value == 2.2
        assert not result.passed


class TestSuites:
    """Tests for suite dispatch."""

    def test_registry(self):
        """Test the three suites are registered."""
        from lrd_prediction.verify import SUITES
        assert set(SUITES) == {"fbm-closed-forms", "kernel-identities", "baxter-constants"}

    def test_unknown_suite(self):
        """Test an unknown suite is a configuration error."""
        from lrd_prediction.verify import run_suite
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError, match="unknown suite"):
            run_suite("everything")

    def test_baxter_constants_window(self, monkeypatch):
        """Test the fBm side checks run on the window t0 = 4, t1 = 1, T = 2."""
        from lrd_prediction import verify
        seen = []

        def record(*args):
            seen.append(next(a for a in args if isinstance(a, verify.PredictionWindow)))
            return 1.0

        for name in ("baxter_lhs", "baxter_rhs", "baxter_lhs_closed_form", "baxter_rhs_closed_form"):
            monkeypatch.setattr(verify, name, record)
        monkeypatch.setattr(verify, "build_ar", lambda model, q: None)
        verify.baxter_constants(verify.QuadratureConfig())
        assert len(seen) == 4
        assert all((w.t0, w.t1, w.T) == (4.0, 1.0, 2.0) for w in seen)

    @pytest.mark.slow
    def test_baxter_constants_pass(self):
        """Test the Baxter suite passes end to end."""
        from lrd_prediction.verify import run_suite
        results = run_suite("baxter-constants")
        assert len(results) == 8
        assert all(r.passed for r in results), [r.row() for r in results if not r.passed]

    @pytest.mark.slow
    def test_kernel_identities_pass(self):
        """Test the kernel identity suite passes end to end."""
        from lrd_prediction.verify import run_suite
        results = run_suite("kernel-identities")
        assert all(r.passed for r in results), [r.row() for r in results if not r.passed]
