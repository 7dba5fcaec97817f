"""Tests for lrd_prediction.kernels module."""

import math
import numpy as np
import pytest

SIN_D = math.sin(math.pi / 4)


class TestKernelB:
    """Tests for the infinite-past kernel b(t, s)."""

    def test_closed_form_values(self, fbm75, fbm75_ar):
        """Test b at the reference points."""
        from lrd_prediction.kernels import eval_b
        assert eval_b(fbm75, fbm75_ar, 1.0, 1.0, closed_form=True) == pytest.approx(0.1125395, rel=1e-6)
        expected = 3.0 ** -0.25 / 4.0 * SIN_D / math.pi
        assert eval_b(fbm75, fbm75_ar, 3.0, 1.0, closed_form=True) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("H", [0.6, 0.75, 0.9])
    def test_quadrature_matches_closed_form(self, H):
        """Test the numerical path reproduces the fBm kernel on a 10 x 10 grid."""
        from lrd_prediction.duality import build_ar
        from lrd_prediction.kernels import b_closed_form, eval_b
        from lrd_prediction.model import fbm
        model = fbm(H)
        ar = build_ar(model)
        grid = np.logspace(-1.0, 1.0, 10)
        numeric = np.array([[eval_b(model, ar, t, s) for s in grid] for t in grid])
        expected = b_closed_form(H, grid[:, None], grid[None, :])
        np.testing.assert_allclose(numeric, expected, rtol=1e-6)

    def test_vectorized_matches_scalar(self, two_index_model, two_index_ar):
        """Test b_values agrees with eval_b for the two-index model."""
        from lrd_prediction.kernels import b_values, eval_b
        t = np.array([0.3, 2.0])
        vector = b_values(two_index_model, two_index_ar, t, 1.0)
        scalar = [eval_b(two_index_model, two_index_ar, x, 1.0) for x in t]
        np.testing.assert_allclose(vector, scalar, rtol=1e-6)

    def test_rejects_nonpositive(self, fbm75, fbm75_ar):
        """Test t and s must be positive."""
        from lrd_prediction.kernels import eval_b
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError):
            eval_b(fbm75, fbm75_ar, 0.0, 1.0)


class TestKernelIdentities:
    """Tests for normalization and reproduction."""

    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
    def test_b_mass_fbm(self, fbm75, fbm75_ar, s):
        """Test b(., s) integrates to one."""
        from lrd_prediction.kernels import b_mass
        assert b_mass(fbm75, fbm75_ar, s) == pytest.approx(1.0, abs=1e-3)

    def test_b_mass_two_index(self, two_index_model, two_index_ar):
        """Test normalization for the two-index model."""
        from lrd_prediction.kernels import b_mass
        assert b_mass(two_index_model, two_index_ar, 1.0) == pytest.approx(1.0, abs=1e-3)

    def test_b_mass_tail_closure(self, two_index_model, two_index_ar):
        """Test the mass does not depend on where the tail is closed."""
        from lrd_prediction.kernels import b_mass
        short = b_mass(two_index_model, two_index_ar, 1.0, decades=4.0)
        long = b_mass(two_index_model, two_index_ar, 1.0, decades=8.0)
        assert short == pytest.approx(long, abs=2e-4)

    def test_reproduction_fbm(self, fbm75, fbm75_ar):
        """Test c(t + s) = int_0^t c(t - u) b(u, s) du."""
        from lrd_prediction.kernels import reproduction_residual
        for t in [0.5, 1.0, 4.0]:
            for s in [0.5, 2.0]:
                assert abs(reproduction_residual(fbm75, fbm75_ar, t, s)) < 1e-5

    def test_reproduction_two_index(self, two_index_model, two_index_ar):
        """Test the reproduction identity for the two-index model."""
        from lrd_prediction.kernels import reproduction_residual
        for t, s in [(0.5, 1.0), (2.0, 0.5)]:
            assert abs(reproduction_residual(two_index_model, two_index_ar, t, s)) < 1e-5


class TestKernelTable:
    """Tests for the h-series table."""

    def test_h_matches_closed_form(self, fbm75_table):
        """Test the tabulated h against the fBm formula."""
        from lrd_prediction.kernels import h_closed_form
        s, u = fbm75_table.s_values, fbm75_table.u_values
        expected = h_closed_form(0.75, 2.0, s[:, None], u[None, :])
        np.testing.assert_allclose(fbm75_table.h_grid, expected, rtol=1e-4)

    def test_eval_h_reference(self, fbm75_table):
        """Test h(1, 1; 2) and that it dominates b(1, 1)."""
        from lrd_prediction.kernels import eval_h
        value = eval_h(fbm75_table, 1.0, 1.0)
        assert value == pytest.approx(0.148109, rel=1e-4)
        assert value > 0.1125395

    def test_eval_h_uses_grid(self, fbm75_table):
        """Test a grid point is read from the table."""
        from lrd_prediction.kernels import eval_h
        s, u = fbm75_table.s_values[2], fbm75_table.u_values[4]
        assert eval_h(fbm75_table, s, u) == fbm75_table.h_grid[2, 4]

    def test_eval_h_rejects_s_outside_window(self, fbm75_table):
        """Test s must lie in (0, t2)."""
        from lrd_prediction.kernels import eval_h
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError):
            eval_h(fbm75_table, 2.0, 1.0)

    def test_series_converged(self, fbm75_table):
        """Test the series record and its geometric decay."""
        assert fbm75_table.series_terms >= 2
        assert fbm75_table.truncation_estimate < fbm75_table.q.rel_tol
        norms = fbm75_table.pair_norms
        assert all(b < a for a, b in zip(norms, norms[1:]))

    def test_leading_terms_positive(self, fbm75_table):
        """Test the kept iterates are positive and b_1 is the b grid."""
        assert len(fbm75_table.bn_grids) == 3
        np.testing.assert_array_equal(fbm75_table.bn_grids[0], fbm75_table.b_grid)
        for grid in fbm75_table.bn_grids:
            assert np.all(grid > 0)

    def test_series_limit(self, fbm75_table):
        """Test SeriesConvergenceError carries the last term."""
        from lrd_prediction.kernels import alternating_series
        from lrd_prediction.errors import SeriesConvergenceError
        op = fbm75_table.operator
        with pytest.raises(SeriesConvergenceError) as info:
            alternating_series(
                op,
                fbm75_table.b_grid[:1, :1],
                rows_odd=op.rows(1.0),
                rows_even=op.rows(1.0),
                columns=op.columns(1.0),
                max_terms=3,
            )
        assert info.value.terms == 3
        assert info.value.last_norm > 0

    def test_rejects_bad_s(self, fbm75, fbm75_ar):
        """Test s values must lie inside the window."""
        from lrd_prediction.kernels import build_kernel_table
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError):
            build_kernel_table(fbm75, fbm75_ar, 2.0, s_values=[0.5, 2.5])


class TestIterates:
    """Tests for b_n and its B_k cross-representation."""

    def test_first_iterate_is_b(self, fbm75_table):
        """Test b_1 = b."""
        from lrd_prediction.kernels import eval_b_n
        assert eval_b_n(fbm75_table, 1, 1.0, 1.0) == pytest.approx(0.1125395, rel=1e-6)

    @pytest.mark.parametrize("k,tol", [(2, 1e-5), (3, 1e-4)])
    def test_b_n_matches_B_k(self, fbm75, fbm75_ar, fbm75_table, k, tol):
        """Test the recursion against the delta_k representation."""
        from lrd_prediction.kernels import eval_B_k, eval_b_n
        recursion = eval_b_n(fbm75_table, k, 1.0, 1.0)
        chained = eval_B_k(fbm75, fbm75_ar, k, 1.0, 1.0, 2.0)
        assert recursion > 0
        assert chained == pytest.approx(recursion, rel=tol)

    def test_coverage_error(self, fbm75_table):
        """Test a point outside the grid asks for extension."""
        from lrd_prediction.kernels import eval_b_n
        from lrd_prediction.errors import GridCoverageError
        with pytest.raises(GridCoverageError) as info:
            eval_b_n(fbm75_table, 2, 1e-30, 1.0)
        assert info.value.requested == 1e-30
        assert info.value.exit_code == 3

    def test_extend_table(self, fbm75_table):
        """Test an extended table covers the new range with the same h."""
        from lrd_prediction.kernels import extend_kernel_table
        extended = extend_kernel_table(fbm75_table, 1e-12, 1e6)
        lo, hi = extended.coverage
        assert lo <= 1e-12 and hi >= 1e6
        np.testing.assert_allclose(extended.h_grid, fbm75_table.h_grid, rtol=1e-4)

    def test_rejects_bad_n(self, fbm75_table):
        """Test n must be a positive integer."""
        from lrd_prediction.kernels import eval_b_n
        from lrd_prediction.errors import ConfigurationError
        with pytest.raises(ConfigurationError):
            eval_b_n(fbm75_table, 0, 1.0, 1.0)


class TestDeltaK:
    """Tests for the chained beta integrals."""

    def test_delta_1(self, fbm75, fbm75_ar):
        """Test delta_1(u, v; t) = beta(t + u + v)."""
        from lrd_prediction.kernels import eval_delta_k
        assert eval_delta_k(fbm75, fbm75_ar, 1, 0.0, 0.0, 2.0) == pytest.approx(0.1125395, rel=1e-6)
        assert eval_delta_k(fbm75, fbm75_ar, 1, 1.0, 1.0, 2.0) == pytest.approx(0.0562697, rel=1e-5)

    def test_delta_2_scaling(self, fbm75, fbm75_ar):
        """Test t delta_2(0, 0; t) tends to f_2(0) sin^2(pi d)."""
        from lrd_prediction.kernels import eval_delta_k
        t = 1e3
        expected = SIN_D ** 2 / math.pi ** 2
        assert t * eval_delta_k(fbm75, fbm75_ar, 2, 0.0, 0.0, t) == pytest.approx(expected, rel=0.05)

    def test_delta_4_qmc(self, fbm75, fbm75_ar):
        """Test the quasi-Monte Carlo depth is positive and below delta_3."""
        from lrd_prediction.kernels import delta_k_qmc, eval_delta_k
        value, stderr = delta_k_qmc(fbm75, fbm75_ar, 4, 0.5, 0.5, 2.0)
        assert value > 0
        assert stderr < 0.05 * value
        assert value < eval_delta_k(fbm75, fbm75_ar, 3, 0.5, 0.5, 2.0)

    def test_unsupported_depth(self, fbm75, fbm75_ar):
        """Test k beyond the configured maximum."""
        from lrd_prediction.kernels import eval_delta_k
        from lrd_prediction.errors import UnsupportedDepthError
        with pytest.raises(UnsupportedDepthError) as info:
            eval_delta_k(fbm75, fbm75_ar, 7, 0.5, 0.5, 2.0)
        assert info.value.exit_code == 2
        assert info.value.maximum == 6

    def test_B_k_vanishes_with_s(self, fbm75, fbm75_ar):
        """Test B_2(t, s) -> 0 as s -> 0."""
        from lrd_prediction.kernels import eval_B_k
        small = eval_B_k(fbm75, fbm75_ar, 2, 1.0, 1e-6, 2.0)
        assert 0 < small < 0.1 * eval_B_k(fbm75, fbm75_ar, 2, 1.0, 1.0, 2.0)


class TestKKernel:
    """Tests for k(t, s) and its bound."""

    def test_bound(self, fbm75, fbm75_ar):
        """Test k(1, 1; 2) <= c(1) alpha(3)."""
        from lrd_prediction.kernels import eval_k_kernel, k_bound
        value = eval_k_kernel(fbm75, fbm75_ar, 1.0, 1.0, 2.0)
        bound = k_bound(fbm75, fbm75_ar, 1.0, 1.0, 2.0)
        assert 0 < value <= bound
        assert bound == pytest.approx(3.0 ** -0.25 / (math.gamma(0.25) * math.gamma(0.75)), rel=1e-8)

    def test_decays_in_t(self, fbm75, fbm75_ar):
        """Test k(t, 1) decreases in t."""
        from lrd_prediction.kernels import eval_k_kernel
        values = [eval_k_kernel(fbm75, fbm75_ar, t, 1.0, 2.0) for t in [0.5, 2.0, 8.0, 32.0]]
        assert all(a > b > 0 for a, b in zip(values, values[1:]))

    @pytest.mark.slow
    def test_row_sums_plateau(self, fbm75, fbm75_ar):
        """Test row sums stay bounded as the upper limit grows."""
        from lrd_prediction.kernels import k_row_sums
        x = np.array([0.5, 2.0])
        small = k_row_sums(fbm75, fbm75_ar, 2.0, x, 10.0)
        large = k_row_sums(fbm75, fbm75_ar, 2.0, x, 1000.0)
        assert np.all(large >= small)
        assert np.all(large < 2.0 * small + 1.0)
