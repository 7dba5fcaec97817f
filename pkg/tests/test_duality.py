"""Tests for lrd_prediction.duality module."""

import math
import numpy as np
import pytest


class TestBuildAr:
    """Tests for build_ar."""

    def test_fbm_defaults_to_closed_form(self, fbm75_ar):
        """Test fBm uses the exact power law."""
        from lrd_prediction.config import ArMethod
        assert fbm75_ar.method == ArMethod.CLOSED_FORM
        assert fbm75_ar.is_closed_form
        assert fbm75_ar.grid is None

    def test_two_index_inverts(self, two_index_ar):
        """Test the two-index model is tabulated by inversion."""
        from lrd_prediction.config import ArMethod
        assert two_index_ar.method == ArMethod.NUMERIC_INVERSION
        lo, hi = two_index_ar.grid
        assert lo == pytest.approx(1e-6)
        assert hi == pytest.approx(1e6)

    def test_closed_form_unavailable_for_two_index(self, two_index_model):
        """Test forcing the closed form on a two-index model fails."""
        from lrd_prediction.config import ArMethod
        from lrd_prediction.duality import build_ar
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError, match="closed-form"):
            build_ar(two_index_model, method=ArMethod.CLOSED_FORM)

    def test_summary(self, fbm75_ar):
        """Test the summary names the method."""
        summary = fbm75_ar.summary()
        assert summary["method"] == "closed_form"
        assert summary["model"]["H"] == 0.75


class TestEvaluators:
    """Tests for eval_a, eval_alpha, eval_beta and alpha_hat."""

    def test_eval_a_fbm(self, fbm75_ar):
        """Test a(1) = 0.25 / Gamma(0.75) and the power law."""
        from lrd_prediction.duality import eval_a
        assert eval_a(fbm75_ar, 1.0) == pytest.approx(0.204012, rel=1e-5)
        assert eval_a(fbm75_ar, 2.0) == pytest.approx(2.0 ** -1.25 * eval_a(fbm75_ar, 1.0), rel=1e-12)

    def test_eval_a_rejects_nonpositive(self, fbm75_ar):
        """Test a(t) needs t > 0."""
        from lrd_prediction.duality import eval_a
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError):
            eval_a(fbm75_ar, 0.0)

    def test_eval_alpha_fbm(self, fbm75_ar):
        """Test alpha(1) = 1 / Gamma(0.75)."""
        from lrd_prediction.duality import eval_alpha
        assert eval_alpha(fbm75_ar, 1.0) == pytest.approx(1.0 / math.gamma(0.75), rel=1e-12)

    def test_alpha_hat_fbm(self, fbm75):
        """Test alpha_hat(y) = y^(H - 3/2)."""
        from lrd_prediction.duality import alpha_hat
        assert alpha_hat(fbm75, 1.0) == pytest.approx(1.0)
        assert alpha_hat(fbm75, 4.0) == pytest.approx(0.353553, rel=1e-5)

    def test_alpha_hat_rejects_nonpositive(self, fbm75):
        """Test alpha_hat needs y > 0."""
        from lrd_prediction.duality import alpha_hat
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError):
            alpha_hat(fbm75, -1.0)

    def test_eval_beta_fbm(self, fbm75, fbm75_ar):
        """Test beta(2) = sin(pi/4) / (2 pi) and the 1/t law."""
        from lrd_prediction.duality import eval_beta
        assert eval_beta(fbm75, fbm75_ar, 2.0) == pytest.approx(0.1125395, rel=1e-6)
        assert eval_beta(fbm75, fbm75_ar, 1.0) == pytest.approx(2.0 * eval_beta(fbm75, fbm75_ar, 2.0), rel=1e-12)

    def test_beta_quadrature_matches_closed_form(self, fbm75):
        """Test the beta integral with the inverted a reproduces the fBm value."""
        from lrd_prediction.config import ArMethod
        from lrd_prediction.duality import build_ar, eval_beta
        numeric = build_ar(fbm75, method=ArMethod.NUMERIC_INVERSION)
        assert eval_beta(fbm75, numeric, 2.0) == pytest.approx(0.1125395, rel=1e-5)


class TestInversion:
    """Tests for the numerical inversion against oracles."""

    def test_fbm_inversion_oracle(self, fbm75):
        """Test forced inversion of fBm reproduces the exact a and alpha."""
        from lrd_prediction.config import ArMethod
        from lrd_prediction.duality import a_asymptotic, alpha_asymptotic, build_ar
        numeric = build_ar(fbm75, method=ArMethod.NUMERIC_INVERSION)
        t = np.logspace(-2, 2, 17)
        np.testing.assert_allclose(numeric.a(t), a_asymptotic(fbm75, t), rtol=1e-5)
        np.testing.assert_allclose(numeric.alpha(t), alpha_asymptotic(fbm75, t), rtol=1e-5)

    @pytest.mark.parametrize("H", [0.6, 0.9])
    def test_fbm_inversion_other_indices(self, H):
        """Test the inversion oracle across indices."""
        from lrd_prediction.config import ArMethod
        from lrd_prediction.duality import a_asymptotic, build_ar
        from lrd_prediction.model import fbm
        model = fbm(H)
        numeric = build_ar(model, method=ArMethod.NUMERIC_INVERSION)
        t = np.logspace(-2, 2, 9)
        np.testing.assert_allclose(numeric.a(t), a_asymptotic(model, t), rtol=1e-5)

    def test_positive_and_decreasing(self, two_index_ar):
        """Test a and alpha are positive and decreasing on the table."""
        t = np.logspace(-5, 5, 101)
        a, alpha = two_index_ar.a(t), two_index_ar.alpha(t)
        assert np.all(a > 0) and np.all(alpha > 0)
        assert np.all(np.diff(a) < 0) and np.all(np.diff(alpha) < 0)

    def test_duality_round_trip(self, two_index_model, two_index_ar):
        """Test y c_hat(y) alpha_hat(y) = 1 with alpha_hat from the table."""
        from lrd_prediction.duality import duality_residual
        for y in np.logspace(-3, 3, 7):
            assert abs(duality_residual(two_index_model, two_index_ar, y)) < 1e-5

    def test_stehfest_cross_check(self, two_index_model, two_index_ar):
        """Test Gaver-Stehfest agrees with the Talbot table."""
        from lrd_prediction.duality import stehfest_alpha
        t = np.array([0.1, 1.0, 10.0])
        np.testing.assert_allclose(stehfest_alpha(two_index_model, t), two_index_ar.alpha(t), rtol=5e-3)

    def test_large_t_asymptotic(self, two_index_model, two_index_ar):
        """Test a approaches the fBm(H) law at large t."""
        from lrd_prediction.duality import a_asymptotic
        ratios = [float(two_index_ar.a(t) / a_asymptotic(two_index_model, t)) for t in [1e2, 1e4, 1e6]]
        assert abs(ratios[2] - 1.0) < abs(ratios[1] - 1.0) < abs(ratios[0] - 1.0)

    def test_beta_large_t(self, two_index_model, two_index_ar):
        """Test t beta(t) pi / sin(pi d) tends to 1."""
        from lrd_prediction.duality import eval_beta
        d = two_index_model.d
        scaled = [t * eval_beta(two_index_model, two_index_ar, t) * math.pi / math.sin(math.pi * d) for t in [1e2, 1e4]]
        assert abs(scaled[1] - 1.0) < abs(scaled[0] - 1.0)

    def test_beta_at_table_end(self, two_index_model, two_index_ar):
        """Test beta is computed up to the end of the AR table."""
        from lrd_prediction.duality import eval_beta
        d = two_index_model.d
        scaled = [t * eval_beta(two_index_model, two_index_ar, t) * math.pi / math.sin(math.pi * d) for t in [1e4, 1e6]]
        assert all(math.isfinite(v) and v > 0 for v in scaled)
        assert abs(scaled[1] - 1.0) < abs(scaled[0] - 1.0)

    def test_rejects_non_monotone_table(self):
        """Test a non-decreasing inversion table is reported with its nodes."""
        from lrd_prediction.duality import _check_table
        from lrd_prediction.errors import InversionError
        t = np.array([1.0, 2.0, 3.0])
        with pytest.raises(InversionError) as info:
            _check_table(t, np.array([3.0, 2.0, 2.5]), np.array([3.0, 2.0, 1.0]))
        assert info.value.nodes == [3.0]
