"""Tests for the divergence estimate, the Monte Carlo oracles, the bootstrap and the density models."""

import math

import numpy as np
import pytest
from scipy import stats

from hpdiv.densities import draw, logpdf, pdf
from hpdiv.errors import BootstrapError, InvalidInputError, OracleError
from hpdiv.estimator import (
    bootstrap_interval,
    divergence_from_r,
    estimate_divergence,
    true_bayes_error,
    true_hp_divergence,
)
from hpdiv.models import DensityModel, LabeledPointSet, OracleConfig

# D_0.5 between N((0,0), I) and N((1,0), I), by one-dimensional quadrature
SHIFTED_GAUSSIAN_HP = 0.2040543

# Phi(-1/2): Bayes error of the same pair
SHIFTED_GAUSSIAN_BAYES = 0.3085375

F0 = DensityModel.gaussian([0.0, 0.0])
F1 = DensityModel.gaussian([1.0, 0.0])


class TestEstimate:
    """Test the point estimate on hand-checked samples."""

    def test_alternating_line(self, alternating_line):
        """Test the raw estimate goes negative and is clamped."""
        estimate = estimate_divergence(alternating_line)
        assert estimate.r_statistic == 3
        assert estimate.d_hat_raw == -0.5
        assert estimate.d_hat == 0.0
        assert estimate.a_hat == 1.5

    def test_separated_clusters(self, separated_clusters):
        """Test R = 1 with two points per class."""
        estimate = estimate_divergence(separated_clusters)
        assert estimate.d_hat_raw == 0.5
        assert estimate.d_hat == 0.5

    def test_single_pair(self):
        """Test m = n = 1 gives zero."""
        estimate = estimate_divergence(LabeledPointSet.from_arrays([[0.0]], [[1.0]]))
        assert estimate.d_hat_raw == 0.0

    def test_identity(self, rng, uniform_sample):
        """Test d_hat_raw = 1 - a_hat and the class proportions."""
        estimate = estimate_divergence(uniform_sample(rng, 30, 70))
        assert estimate.d_hat_raw == 1.0 - estimate.a_hat
        assert estimate.p_hat == pytest.approx(0.3)
        assert estimate.q_hat == pytest.approx(0.7)
        assert 0.0 <= estimate.d_hat <= 1.0

    def test_from_r(self):
        """Test the count-to-estimate mapping."""
        assert divergence_from_r(1, 1, 1).d_hat_raw == 0.0
        assert divergence_from_r(0, 3, 3).d_hat == 1.0
        with pytest.raises(InvalidInputError):
            divergence_from_r(1, 0, 3)

    def test_separated_gaussians(self):
        """Test far-apart samples give an estimate near 1."""
        rng = np.random.default_rng(3)
        sample = LabeledPointSet.from_arrays(rng.normal(size=(200, 2)), rng.normal(size=(200, 2)) + 20.0)
        assert estimate_divergence(sample).d_hat == pytest.approx(1.0, abs=0.01)


class TestHpOracle:
    """Test the Monte Carlo HP-divergence."""

    def test_equal_densities(self):
        """Test D(f, f) = 0 for every family."""
        oracle = OracleConfig(samples=5000, seed=1)
        for model in (F0, DensityModel.gamma_copula(), DensityModel.student_t()):
            result = true_hp_divergence(model, model, 0.5, oracle)
            assert abs(result.value) < 1e-12
            assert result.hp_integral == pytest.approx(1.0)

    def test_shifted_gaussians(self):
        """Test the regression constant for unit-shifted planar Gaussians."""
        result = true_hp_divergence(F0, F1, 0.5, OracleConfig(samples=400000, seed=2))
        assert abs(result.value - SHIFTED_GAUSSIAN_HP) < 4 * result.standard_error
        assert not result.flagged

    def test_symmetry(self):
        """Test D_p(f0, f1) = D_q(f1, f0)."""
        oracle = OracleConfig(samples=200000, seed=3)
        forward = true_hp_divergence(F0, F1, 0.3, oracle)
        backward = true_hp_divergence(F1, F0, 0.7, oracle)
        tolerance = 4 * math.hypot(forward.standard_error, backward.standard_error)
        assert abs(forward.value - backward.value) < tolerance

    def test_deterministic(self):
        """Test a fixed oracle seed gives a fixed value."""
        oracle = OracleConfig(samples=3000, seed=4)
        assert true_hp_divergence(F0, F1, 0.5, oracle).value == true_hp_divergence(F0, F1, 0.5, oracle).value

    def test_flagged(self):
        """Test a loose estimate is flagged against a tight tolerance."""
        result = true_hp_divergence(F0, F1, 0.5, OracleConfig(samples=1000, seed=5, se_tolerance=1e-6))
        assert result.flagged

    def test_invalid_inputs(self):
        """Test bad proportions and mismatched dimensions."""
        oracle = OracleConfig(samples=1000)
        with pytest.raises(InvalidInputError):
            true_hp_divergence(F0, F1, 1.0, oracle)
        with pytest.raises(OracleError):
            true_hp_divergence(F0, DensityModel.gaussian([0.0, 0.0, 0.0]), 0.5, oracle)


class TestBayesOracle:
    """Test the Monte Carlo Bayes error."""

    def test_equal_densities(self):
        """Test the error equals min(p, q) when the classes coincide."""
        result = true_bayes_error(F0, F0, 0.3, OracleConfig(samples=2000, seed=1))
        assert result.value == pytest.approx(0.3, abs=1e-12)

    def test_far_apart(self):
        """Test practically disjoint classes give zero error."""
        far = DensityModel.gaussian([40.0, 0.0])
        assert true_bayes_error(F0, far, 0.5, OracleConfig(samples=2000, seed=1)).value < 1e-10

    def test_shifted_gaussians(self):
        """Test Phi(-1/2) for unit-shifted Gaussians."""
        result = true_bayes_error(F0, F1, 0.5, OracleConfig(samples=400000, seed=6))
        assert abs(result.value - SHIFTED_GAUSSIAN_BAYES) < 4 * result.standard_error


class TestBootstrap:
    """Test the percentile bootstrap interval."""

    def test_too_few_trials(self, alternating_line):
        """Test 99 trials are refused."""
        with pytest.raises(InvalidInputError):
            bootstrap_interval(alternating_line, trials=99)

    def test_invalid_level(self, alternating_line):
        """Test the level must lie strictly inside (0, 1)."""
        with pytest.raises(InvalidInputError):
            bootstrap_interval(alternating_line, trials=100, level=1.0)

    def test_ordering(self):
        """Test low <= high and the interval holds the bootstrap mean."""
        rng = np.random.default_rng(10)
        sample = LabeledPointSet.from_arrays(rng.normal(size=(100, 2)), rng.normal(size=(100, 2)))
        interval = bootstrap_interval(sample, trials=200, level=0.95, seed=1)
        assert interval.low <= interval.high
        assert interval.low <= interval.bootstrap_mean <= interval.high
        assert interval.d_hat_low <= interval.d_hat_high
        assert interval.point == estimate_divergence(sample).r_statistic

    def test_reproducible_across_workers(self):
        """Test the interval depends only on the seed."""
        rng = np.random.default_rng(11)
        sample = LabeledPointSet.from_arrays(rng.random((40, 2)), rng.random((40, 2)))
        serial = bootstrap_interval(sample, trials=100, seed=3, workers=1)
        threaded = bootstrap_interval(sample, trials=100, seed=3, workers=4)
        assert serial == threaded

    def test_degenerate_resamples(self):
        """Test a class that keeps collapsing exhausts its retries."""
        sample = LabeledPointSet.from_arrays([[0.0, 0.0], [1.0, 0.0]], [[0.0, 1.0], [1.0, 1.0]])
        with pytest.raises(BootstrapError):
            bootstrap_interval(sample, trials=100, seed=0, max_retries=0)

    def test_constant_class_is_allowed(self):
        """Test a class made of one repeated point is not treated as degenerate."""
        sample = LabeledPointSet.from_arrays([[0.0, 0.0]] * 5, np.random.default_rng(1).random((5, 2)))
        interval = bootstrap_interval(sample, trials=100, seed=0)
        assert interval.low <= interval.high


class TestDensities:
    """Test density evaluation and sampling."""

    def test_gaussian_peak(self):
        """Test the standard planar Gaussian at its mean."""
        assert pdf(F0, [0.0, 0.0])[0] == pytest.approx(1.0 / (2.0 * math.pi))

    def test_independent_copula(self):
        """Test rho = 0 reduces to a product of gamma marginals."""
        model = DensityModel.gamma_copula(dim=2, alpha=2.0, beta=1.5, rho=0.0)
        x = np.array([[0.5, 1.2], [2.0, 0.3]])
        expected = stats.gamma.pdf(x, 2.0, scale=1.0 / 1.5).prod(axis=1)
        assert np.allclose(pdf(model, x), expected, rtol=1e-10)

    def test_copula_support(self):
        """Test the gamma copula vanishes off the positive orthant."""
        model = DensityModel.gamma_copula()
        assert np.isneginf(logpdf(model, [[-1.0, 1.0]])[0])

    def test_student_t(self):
        """Test independent t marginals."""
        model = DensityModel.student_t(dim=2, df=5.0)
        x = np.array([[0.3, -1.0]])
        assert logpdf(model, x)[0] == pytest.approx(stats.t.logpdf(x, 5.0).sum())

    def test_wrong_shape(self):
        """Test points of the wrong dimension are refused."""
        with pytest.raises(OracleError):
            logpdf(F0, [[0.0, 0.0, 0.0]])

    def test_copula_sampling(self):
        """Test gamma marginal means and the normal-score correlation."""
        model = DensityModel.gamma_copula(dim=2, alpha=1.0, beta=1.0, rho=0.5)
        points = draw(model, 100000, np.random.default_rng(7))
        assert np.all(points > 0.0)
        assert points.mean(axis=0) == pytest.approx([1.0, 1.0], abs=0.02)
        scores = stats.norm.ppf(stats.gamma.cdf(points, 1.0))
        assert np.corrcoef(scores.T)[0, 1] == pytest.approx(0.5, abs=0.02)

    def test_draws_are_seeded(self):
        """Test a seeded generator gives the same draws."""
        first = draw(DensityModel.student_t(), 10, np.random.default_rng(1))
        assert np.array_equal(first, draw(DensityModel.student_t(), 10, np.random.default_rng(1)))
