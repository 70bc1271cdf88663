"""Tests for the Friedman-Rafsky statistic, its partitioned and dual forms and the runs test."""

import numpy as np
import pytest
from scipy.stats import special_ortho_group

from hpdiv.emst import brute_force_mst
from hpdiv.errors import InvalidInputError
from hpdiv.fr import (
    PLANAR_DEGREE_BOUND,
    assign_cells,
    degree_constant,
    dual_fr_statistic,
    fr_statistic,
    fr_test,
    null_moments,
    partition_fr,
    perturb_one_point_delta,
    subadditivity_spot_check,
)
from hpdiv.models import LabeledPointSet


class TestFrStatistic:
    """Test R on hand-checked samples."""

    def test_single_pair(self):
        """Test one point per class: the only edge crosses."""
        sample = LabeledPointSet.from_arrays([[0.0, 0.0]], [[1.0, 0.0]])
        assert fr_statistic(sample).r_statistic == 1

    def test_alternating_line(self, alternating_line):
        """Test every edge of the alternating line is dichotomous."""
        result = fr_statistic(alternating_line)
        assert result.r_statistic == 3
        assert result.dichotomous.all()
        points, _ = alternating_line.merged()
        assert result.tree.edge_set() == brute_force_mst(points).edge_set()

    def test_separated_clusters(self, separated_clusters):
        """Test only the bridge crosses."""
        result = fr_statistic(separated_clusters)
        assert result.r_statistic == 1
        assert result.dichotomous.sum() == 1

    def test_range(self, rng, uniform_sample):
        """Test 1 <= R <= N - 1."""
        for _ in range(50):
            m, n = int(rng.integers(1, 30)), int(rng.integers(1, 30))
            r = fr_statistic(uniform_sample(rng, m, n)).r_statistic
            assert 1 <= r <= m + n - 1

    def test_label_symmetry(self, rng, uniform_sample):
        """Test swapping X and Y leaves R unchanged."""
        for _ in range(20):
            sample = uniform_sample(rng, 25, 35, d=3)
            assert fr_statistic(sample).r_statistic == fr_statistic(sample.swapped()).r_statistic

    def test_rigid_motion_invariance(self, rng, uniform_sample):
        """Test rotation, translation and uniform scaling leave R unchanged."""
        for trial in range(20):
            sample = uniform_sample(rng, 30, 30, d=3)
            rotation = special_ortho_group.rvs(3, random_state=trial)
            shift = rng.normal(size=3)
            moved = LabeledPointSet.from_arrays(
                3.7 * sample.x_points.points @ rotation.T + shift,
                3.7 * sample.y_points.points @ rotation.T + shift,
            )
            assert fr_statistic(moved).r_statistic == fr_statistic(sample).r_statistic

    def test_methods_agree(self, rng, uniform_sample):
        """Test Prim and Boruvka give the same statistic."""
        sample = uniform_sample(rng, 200, 150, d=2)
        assert fr_statistic(sample, "prim").r_statistic == fr_statistic(sample, "boruvka").r_statistic

    def test_unknown_method(self, alternating_line):
        """Test an unknown builder name is rejected."""
        with pytest.raises(InvalidInputError):
            fr_statistic(alternating_line, "kruskal")


class TestDegreeConstant:
    """Test the choice of c_d."""

    def test_planar(self):
        """Test the classical bound in the plane."""
        assert degree_constant(2) == PLANAR_DEGREE_BOUND

    def test_override(self):
        """Test an explicit value wins."""
        assert degree_constant(5, override=12) == 12

    def test_observed_degree(self, rng, uniform_sample):
        """Test higher dimensions fall back to the observed degree."""
        tree = fr_statistic(uniform_sample(rng, 20, 20, d=4)).tree
        assert degree_constant(4, tree) == int(tree.degrees().max())
        with pytest.raises(InvalidInputError):
            degree_constant(4)


class TestPartition:
    """Test partition_fr and the subadditivity inequality."""

    def test_lattice_points_on_cell_faces(self):
        """Test points exactly on a cell face fall in the cell that face opens."""
        points = (np.arange(100) / 100.0).reshape(-1, 1)
        coords, _, _ = assign_cells(points, 100, frame="unit")
        assert coords.ravel().tolist() == list(range(100))

    def test_lattice_faces_bounding_frame(self):
        """Test face points in the bounding frame, the top face staying in the last cell."""
        points = np.column_stack([np.arange(51) / 50.0, np.zeros(51)])
        coords, low, side = assign_cells(points, 50)
        assert side == 1.0
        assert coords[:, 0].tolist() == list(range(50)) + [49]
        assert (coords[:, 1] == 0).all()

    def test_one_cell(self, rng, uniform_sample):
        """Test l = 1 reproduces the global statistic."""
        sample = uniform_sample(rng, 20, 20)
        report = partition_fr(sample, 1)
        assert report.per_cell_r == [fr_statistic(sample).r_statistic]
        assert report.crossing_edge_count == 0
        assert report.cells == [(0, 0)]

    def test_alternating_line_two_cells(self, alternating_line):
        """Test the split at x = 1.5 of the alternating line."""
        report = partition_fr(alternating_line, 2)
        assert report.cells == [(0, 0), (1, 0)]
        assert report.per_cell_r == [1, 1]
        assert report.cell_counts == [2, 2]
        assert report.crossing_edge_count == 1
        assert report.global_r == 3
        assert report.inequality_margin == 1

    def test_invalid_level(self, alternating_line):
        """Test l < 1 is rejected."""
        with pytest.raises(InvalidInputError):
            partition_fr(alternating_line, 0)

    def test_unit_frame_bounds(self):
        """Test the unit frame needs coordinates in [0, 1]."""
        sample = LabeledPointSet.from_arrays([[0.5, 0.5]], [[1.5, 0.5]])
        with pytest.raises(InvalidInputError):
            partition_fr(sample, 2, frame="unit")

    def test_counts_cover_sample(self, rng, uniform_sample):
        """Test every point lands in exactly one cell."""
        sample = uniform_sample(rng, 40, 60)
        report = partition_fr(sample, 3, frame="unit")
        assert sum(report.cell_counts) == sample.total

    @pytest.mark.parametrize("l", [2, 3])
    def test_subadditivity(self, l):
        """Test R <= sum(R_i) + 2|D| on 500 random planar instances."""
        rng = np.random.default_rng(40 + l)
        for _ in range(500):
            m, n = int(rng.integers(5, 100)), int(rng.integers(5, 100))
            sample = LabeledPointSet.from_arrays(rng.random((m, 2)), rng.random((n, 2)))
            assert partition_fr(sample, l).inequality_margin >= 0

    def test_subadditivity_higher_dimension(self):
        """Test the inequality in three dimensions."""
        rng = np.random.default_rng(3)
        for _ in range(100):
            sample = LabeledPointSet.from_arrays(rng.random((40, 3)), rng.normal(size=(30, 3)))
            assert partition_fr(sample, 2).inequality_margin >= 0


class TestDualStatistic:
    """Test the corner-augmented dual statistic."""

    def test_cross_pair_in_unit_square(self):
        """Test two points each attached to their nearest corner."""
        sample = LabeledPointSet.from_arrays([[0.1, 0.5]], [[0.9, 0.5]])
        result = dual_fr_statistic(sample, 1, frame="unit")
        assert result.global_r == 1
        assert result.per_cell_corner_edges == [2]
        assert result.dual_r_total == 2
        assert result.dual_r_total >= result.global_r

    def test_sandwich(self):
        """Test R <= R* <= R + c_d 2^d with a single cell in the plane."""
        rng = np.random.default_rng(11)
        for _ in range(300):
            m, n = int(rng.integers(1, 80)), int(rng.integers(1, 80))
            sample = LabeledPointSet.from_arrays(rng.random((m, 2)), rng.random((n, 2)))
            result = dual_fr_statistic(sample, 1)
            r = result.global_r
            assert r <= result.dual_r_total <= r + PLANAR_DEGREE_BOUND * 4

    def test_superadditivity(self):
        """Test sum of cell R* stays below R*(one cell) + 2^d c_d l^d for l = 2."""
        rng = np.random.default_rng(12)
        l, d = 2, 2
        for _ in range(100):
            m, n = int(rng.integers(40, 200)), int(rng.integers(40, 200))
            sample = LabeledPointSet.from_arrays(rng.random((m, d)), rng.random((n, d)))
            split = dual_fr_statistic(sample, l, frame="unit").dual_r_total
            whole = dual_fr_statistic(sample, 1, frame="unit").dual_r_total
            assert split <= whole + 2 ** d * PLANAR_DEGREE_BOUND * l ** d

    def test_cells_reported(self, rng, uniform_sample):
        """Test per-cell lists line up."""
        result = dual_fr_statistic(uniform_sample(rng, 50, 50), 2, frame="unit")
        assert len(result.cells) == len(result.per_cell_dual_r) == len(result.per_cell_corner_edges)
        assert result.corner_edge_count == sum(result.per_cell_corner_edges)


class TestPerturbation:
    """Test one-point smoothness."""

    def test_move_onto_itself(self, rng, uniform_sample):
        """Test a null move changes nothing."""
        sample = uniform_sample(rng, 10, 10)
        assert perturb_one_point_delta(sample, 3, sample.x_points.points[3]) == 0

    def test_two_points(self):
        """Test R stays 1 for a single pair."""
        sample = LabeledPointSet.from_arrays([[0.0, 0.0]], [[1.0, 0.0]])
        assert perturb_one_point_delta(sample, 0, [5.0, 5.0]) == 0

    def test_invalid_index(self, alternating_line):
        """Test indices outside the merged sample are rejected."""
        with pytest.raises(InvalidInputError):
            perturb_one_point_delta(alternating_line, 4, [0.0, 0.0])
        with pytest.raises(InvalidInputError):
            perturb_one_point_delta(alternating_line, -1, [0.0, 0.0])

    def test_invalid_position(self, alternating_line):
        """Test the new position must have the sample's dimension."""
        with pytest.raises(InvalidInputError):
            perturb_one_point_delta(alternating_line, 0, [0.0, 0.0, 0.0])

    def test_bounded_change(self):
        """Test |delta R| <= 4 c_d = 24 over 1000 planar perturbations."""
        rng = np.random.default_rng(24)
        for _ in range(1000):
            m, n = int(rng.integers(2, 30)), int(rng.integers(2, 30))
            sample = LabeledPointSet.from_arrays(rng.random((m, 2)), rng.random((n, 2)))
            index = int(rng.integers(0, m + n))
            assert perturb_one_point_delta(sample, index, rng.random(2)) <= 4 * PLANAR_DEGREE_BOUND


class TestRunsTest:
    """Test the two-sample runs test."""

    def test_null_mean(self, alternating_line):
        """Test E[R] = 2mn/N under relabelling."""
        result = fr_test(alternating_line)
        assert result.null_mean == pytest.approx(2.0)

    def test_null_variance_matches_relabelling(self, rng, uniform_sample):
        """Test the variance formula against random relabelling of a fixed tree."""
        sample = uniform_sample(rng, 25, 35)
        fr = fr_statistic(sample)
        _, labels = sample.merged()
        a, b = fr.tree.edges[:, 0], fr.tree.edges[:, 1]
        counts = []
        for _ in range(4000):
            shuffled = rng.permutation(labels)
            counts.append(int((shuffled[a] != shuffled[b]).sum()))
        mean, variance = null_moments(sample.m, sample.n, fr.tree)
        assert np.mean(counts) == pytest.approx(mean, rel=0.02)
        assert np.var(counts, ddof=1) == pytest.approx(variance, rel=0.15)

    def test_separated_samples_reject(self):
        """Test well-separated samples give small p-values."""
        rng = np.random.default_rng(8)
        sample = LabeledPointSet.from_arrays(rng.normal(size=(30, 2)), rng.normal(size=(30, 2)) + 6.0)
        result = fr_test(sample, permutations=199, seed=1)
        assert result.r_statistic < result.null_mean
        assert result.p_value_normal < 0.01
        assert result.p_value_permutation == pytest.approx(1.0 / 200.0)

    def test_same_distribution(self):
        """Test the rejection rate under equal distributions stays near the level."""
        p_values = []
        for seed in range(200):
            rng = np.random.default_rng(seed)
            sample = LabeledPointSet.from_arrays(rng.normal(size=(30, 2)), rng.normal(size=(30, 2)))
            p_values.append(fr_test(sample).p_value_normal)
        p_values = np.array(p_values)
        assert np.mean(p_values < 0.05) <= 0.12
        assert 0.4 < p_values.mean() < 0.6

    def test_same_distribution_permutation(self):
        """Test the permutation p-value is a valid probability above its floor."""
        rng = np.random.default_rng(9)
        sample = LabeledPointSet.from_arrays(rng.normal(size=(60, 2)), rng.normal(size=(60, 2)))
        result = fr_test(sample, permutations=199, seed=2)
        assert 1.0 / 200.0 <= result.p_value_permutation <= 1.0

    def test_permutation_reproducible(self, rng, uniform_sample):
        """Test the permutation p-value depends only on the seed."""
        sample = uniform_sample(rng, 20, 20)
        first = fr_test(sample, permutations=99, seed=5)
        assert first.p_value_permutation == fr_test(sample, permutations=99, seed=5).p_value_permutation

    def test_too_small(self):
        """Test fewer than four points are refused."""
        sample = LabeledPointSet.from_arrays([[0.0], [1.0]], [[2.0]])
        with pytest.raises(InvalidInputError):
            fr_test(sample)


class TestSpotCheck:
    """Test the Monte Carlo partition-inequality report."""

    def test_report(self):
        """Test the report fields for a small run."""
        report = subadditivity_spot_check(trials=3, m=20, n=20, d=2, h=7, seed=1)
        assert report.trials == 3
        assert report.boundary_scale == pytest.approx(7 * 40 ** 0.5)
        assert report.epsilon == pytest.approx(49 * 7 * 40 ** 0.5)
        assert report.violations == 0
        assert report.violation_fraction <= report.bound

    def test_invalid_trials(self):
        """Test at least one trial is required."""
        with pytest.raises(InvalidInputError):
            subadditivity_spot_check(trials=0, m=5, n=5, d=2)
