"""Tests for lrd_prediction.prediction module."""

import math
import numpy as np
import pytest
from scipy import integrate

SIN_D = math.sin(math.pi / 4)


@pytest.fixture(scope="module")
def window():
    """Window t0 = 1, t1 = 1, T = 2."""
    from lrd_prediction.prediction import PredictionWindow
    return PredictionWindow(1.0, 1.0, 2.0)


@pytest.fixture(scope="module")
def report(fbm75, fbm75_ar, fbm75_table, window):
    """Prediction report of fBm(0.75) for the t2 = 2 window."""
    from lrd_prediction.prediction import build_report
    return build_report(fbm75, fbm75_ar, window, table=fbm75_table, samples=8)


def finite_error(model, ar, t0):
    from lrd_prediction.config import ErrorMode
    from lrd_prediction.kernels import build_kernel_table
    from lrd_prediction.prediction import PredictionWindow, error_variance
    w = PredictionWindow(t0, 0.0, 1.0)
    table = build_kernel_table(model, ar, w.t2)
    return error_variance(model, ar, table, w, ErrorMode.FINITE_PAST)


class TestPredictionWindow:
    """Tests for PredictionWindow."""

    def test_derived_lengths(self, window):
        """Test t2 = t0 + t1 and t3 = T - t1."""
        assert window.t2 == 2.0
        assert window.t3 == 1.0
        assert window.to_dict()["t3"] == 1.0

    def test_rejects_target_inside_window(self):
        """Test T must exceed t1."""
        from lrd_prediction.prediction import PredictionWindow
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError):
            PredictionWindow(1.0, 1.0, 0.5)


class TestCoefficients:
    """Tests for the predictor coefficients."""

    def test_infinite_past_oracle(self, fbm75, fbm75_ar):
        """Test B(1) with t3 = 1 against quadrature of the closed form."""
        from lrd_prediction.prediction import PredictionWindow, infinite_past_coeff
        w = PredictionWindow(1.0, 0.0, 1.0)
        oracle, _ = integrate.quad(lambda tau: tau ** 0.25 / (1.0 + tau), 0.0, 1.0, epsabs=1e-14, epsrel=1e-12)
        expected = SIN_D / math.pi * oracle
        assert infinite_past_coeff(fbm75, fbm75_ar, w, -1.0) == pytest.approx(expected, rel=1e-7)

    def test_infinite_past_decays(self, fbm75, fbm75_ar):
        """Test coefficients decrease toward the distant past."""
        from lrd_prediction.prediction import PredictionWindow, infinite_past_coeff
        w = PredictionWindow(1.0, 0.0, 1.0)
        values = [infinite_past_coeff(fbm75, fbm75_ar, w, s) for s in [-0.1, -1.0, -10.0, -100.0]]
        assert all(a > b > 0 for a, b in zip(values, values[1:]))

    def test_infinite_past_rejects_future(self, fbm75, fbm75_ar):
        """Test s must precede t1."""
        from lrd_prediction.prediction import PredictionWindow, infinite_past_coeff
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError):
            infinite_past_coeff(fbm75, fbm75_ar, PredictionWindow(1.0, 0.0, 1.0), 0.5)

    def test_finite_past_oracle(self, fbm75_table, window):
        """Test the coefficient at s = 0 against quadrature of the closed-form h."""
        from lrd_prediction.kernels import h_closed_form
        from lrd_prediction.prediction import finite_past_coeff
        oracle, _ = integrate.quad(lambda u: float(h_closed_form(0.75, 2.0, 1.0, u)), 0.0, 1.0, epsrel=1e-10)
        assert finite_past_coeff(fbm75_table, window, 0.0) == pytest.approx(oracle, rel=1e-4)

    def test_finite_dominates_infinite(self, fbm75, fbm75_ar, fbm75_table, window):
        """Test the finite-past coefficient exceeds the infinite-past one."""
        from lrd_prediction.prediction import finite_past_coeff_values, integrated_b_values
        s = np.linspace(-0.9, 0.9, 7)
        finite = finite_past_coeff_values(fbm75_table, window, s)
        infinite = integrated_b_values(fbm75, fbm75_ar, window.t1 - s, window.t3)
        assert np.all(infinite > 0)
        assert np.all(finite > infinite)

    def test_finite_past_table_mismatch(self, fbm75_table):
        """Test the table must match the window length."""
        from lrd_prediction.prediction import PredictionWindow, finite_past_coeff
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError, match="t2"):
            finite_past_coeff(fbm75_table, PredictionWindow(1.0, 0.0, 1.0), -0.5)


class TestDn:
    """Tests for the D_n terms."""

    def test_d0(self, fbm75, fbm75_ar):
        """Test D_0(s) = g(t3 - s) and 0 beyond t3."""
        from lrd_prediction.prediction import PredictionWindow, eval_Dn
        w = PredictionWindow(1.0, 0.0, 1.0)
        assert eval_Dn(fbm75, fbm75_ar, None, w, 0, 0.0) == pytest.approx(1.103263, rel=1e-5)
        assert eval_Dn(fbm75, fbm75_ar, None, w, 0, 1.5) == 0.0

    def test_higher_terms_need_table(self, fbm75, fbm75_ar, window):
        """Test n >= 2 without a table is a usage error."""
        from lrd_prediction.prediction import eval_Dn
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError):
            eval_Dn(fbm75, fbm75_ar, None, window, 2, 1.0)

    def test_first_terms_shrink(self, fbm75, fbm75_ar, fbm75_table, window):
        """Test D_1 and D_2 are positive with D_2 the smaller."""
        from lrd_prediction.prediction import eval_Dn
        d1 = eval_Dn(fbm75, fbm75_ar, fbm75_table, window, 1, 1.0)
        d2 = eval_Dn(fbm75, fbm75_ar, fbm75_table, window, 2, 1.0)
        assert d1 > d2 > 0

    def test_contributions_nonincreasing(self, report):
        """Test the squared-norm contributions shrink beyond n = 1."""
        terms = report.dn_term_contributions
        assert terms[0] > 0
        assert all(b <= a * (1.0 + 1e-3) for a, b in zip(terms[1:], terms[2:]))


class TestErrorVariance:
    """Tests for the mean-square prediction errors."""

    def test_infinite_past_reference(self, fbm75, fbm75_ar):
        """Test the H = 0.75 infinite-past error."""
        from lrd_prediction.config import ErrorMode
        from lrd_prediction.prediction import PredictionWindow, error_variance
        w = PredictionWindow(1.0, 0.0, 1.0)
        value = error_variance(fbm75, fbm75_ar, None, w, ErrorMode.INFINITE_PAST)
        assert value == pytest.approx(0.81146, rel=1e-5)

    def test_infinite_past_quadrature(self, two_index_model):
        """Test the g^2 integral is positive and below the variogram."""
        from lrd_prediction.model import variogram
        from lrd_prediction.prediction import PredictionWindow, infinite_error_variance
        w = PredictionWindow(1.0, 0.0, 1.0)
        value = infinite_error_variance(two_index_model, w)
        assert 0 < value < variogram(two_index_model, 1.0)

    def test_finite_past_needs_table(self, fbm75, fbm75_ar):
        """Test FINITE_PAST without a table."""
        from lrd_prediction.config import ErrorMode
        from lrd_prediction.prediction import PredictionWindow, error_variance
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError):
            error_variance(fbm75, fbm75_ar, None, PredictionWindow(1.0, 0.0, 1.0), ErrorMode.FINITE_PAST)

    def test_error_ordering(self, fbm75, fbm75_ar):
        """Test infinite < finite < variogram for t0 = 1."""
        value = finite_error(fbm75, fbm75_ar, 1.0)
        assert 0.81146 < value < 1.063846

    def test_decreasing_in_past_length(self, fbm75, fbm75_ar):
        """Test a longer observed past lowers the error."""
        short = finite_error(fbm75, fbm75_ar, 1.0)
        long = finite_error(fbm75, fbm75_ar, 4.0)
        assert 0.81146 < long < short

    @pytest.mark.slow
    def test_past_length_sweep(self, fbm75, fbm75_ar):
        """Test the finite-past error approaches the infinite-past one over t0 in {1, 4, 16, 64}."""
        values = [finite_error(fbm75, fbm75_ar, t0) for t0 in [1.0, 4.0, 16.0, 64.0]]
        gaps = [v - 0.81146 for v in values]
        assert all(g > 0 for g in gaps)
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 0.25 * gaps[0]
        assert values[0] < 1.063846

    @pytest.mark.parametrize("scale", [0.5, 2.0, 4.0])
    def test_infinite_past_self_similar(self, fbm75, fbm75_ar, scale):
        """Test the error for T = scale is scale^(2H) times the error for T = 1."""
        from lrd_prediction.config import ErrorMode
        from lrd_prediction.prediction import PredictionWindow, error_variance
        base = error_variance(fbm75, fbm75_ar, None, PredictionWindow(1.0, 0.0, 1.0), ErrorMode.INFINITE_PAST)
        scaled = error_variance(fbm75, fbm75_ar, None, PredictionWindow(1.0, 0.0, scale), ErrorMode.INFINITE_PAST)
        assert scaled == pytest.approx(scale ** 1.5 * base, rel=1e-8)

    def test_finite_past_self_similar(self, fbm75, fbm75_ar):
        """Test scaling the whole window by 2 scales the finite-past error by 2^(2H)."""
        from lrd_prediction.config import ErrorMode
        from lrd_prediction.kernels import build_kernel_table
        from lrd_prediction.prediction import PredictionWindow, error_variance
        values = []
        for scale in (1.0, 2.0):
            w = PredictionWindow(scale, 0.0, scale)
            table = build_kernel_table(fbm75, fbm75_ar, w.t2)
            values.append(error_variance(fbm75, fbm75_ar, table, w, ErrorMode.FINITE_PAST))
        assert values[1] == pytest.approx(2.0 ** 1.5 * values[0], rel=1e-4)


class TestReport:
    """Tests for PredictionReport."""

    def test_ordering(self, report):
        """Test the report carries the ordered error chain."""
        assert 0 < report.infinite_error_var < report.finite_error_var < report.trivial_error_var
        assert report.series_terms >= 2

    def test_samples(self, report, window):
        """Test coefficient samples lie where they are defined."""
        assert len(report.finite_coeff_samples) == 8
        assert all(-window.t0 < s < window.t1 for s, _ in report.finite_coeff_samples)
        assert all(s < window.t1 and v > 0 for s, v in report.infinite_coeff_samples)

    def test_tail_mass_small(self, report):
        """Test the tail mass beyond the cutoff is recorded."""
        assert 0 < report.tail_mass
        assert report.tail_cutoff >= report.window.t2

    def test_to_text(self, report):
        """Test the text layout."""
        text = report.to_text()
        assert text.startswith("model: fBm(H=0.75)")
        assert "infinite_error_var: " in text
        assert "[dn_contributions]\nn,contribution\n1," in text
        assert "[finite_coeff]\ns,coeff\n" in text
        assert text.endswith("\n")

    def test_to_dict(self, report):
        """Test camelCase keys."""
        data = report.to_dict()
        assert data["window"]["t2"] == 2.0
        assert data["finiteErrorVar"] == report.finite_error_var


class TestApplyPredictor:
    """Tests for applying the predictor to a path."""

    def _path(self, values):
        from lrd_prediction.montecarlo import PathSample, uniform_grid
        times = uniform_grid(-1.0, 1.0, 0.125)
        return PathSample(times, values(times), seed=0, replicate_index=0)

    def test_zero_path(self, report):
        """Test the zero path predicts zero."""
        from lrd_prediction.prediction import apply_predictor
        assert apply_predictor(report, self._path(np.zeros_like)) == 0.0

    def test_linearity(self, report):
        """Test scaling the path scales the prediction."""
        from lrd_prediction.prediction import apply_predictor
        base = apply_predictor(report, self._path(np.sin))
        scaled = apply_predictor(report, self._path(lambda t: 3.0 * np.sin(t)))
        assert scaled == pytest.approx(3.0 * base, rel=1e-12)

    def test_missing_t1(self, report):
        """Test the grid must contain t1."""
        from lrd_prediction.montecarlo import PathSample
        from lrd_prediction.prediction import apply_predictor
        from lrd_prediction.errors import ConfigurationError
        times = np.array([-1.0, -0.5, 0.0, 0.7])
        path = PathSample(times, np.zeros(4), seed=0, replicate_index=0)
        with pytest.raises(ConfigurationError, match="t1"):
            apply_predictor(report, path)
