"""Tests for labeled CSV ingestion and the real-data sweeps."""

import numpy as np
import pandas as pd
import pytest

from hpdiv.data import (
    detect_delimiter,
    feature_sweep,
    feature_sweep_frame,
    load_labeled_csv,
    sample_size_sweep,
    write_labeled_csv,
)
from hpdiv.errors import DataError, ParseError, SchemaError
from hpdiv.estimator import estimate_divergence
from hpdiv.models import DatasetSpec, LabeledPointSet


def write(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture
def toy_csv(tmp_path):
    return write(tmp_path / "toy.csv", "x,y,label\n0,0,a\n2,0,a\n1,0,b\n3,0,b\n")


class TestLoad:
    """Test load_labeled_csv."""

    def test_toy(self, toy_csv):
        """Test four rows with two classes and two features."""
        sample = load_labeled_csv(DatasetSpec(path=toy_csv, label_column="label", class_pair=("a", "b")))
        assert (sample.m, sample.n, sample.dim) == (2, 2, 2)
        assert sample.x_points.points.tolist() == [[0.0, 0.0], [2.0, 0.0]]
        assert estimate_divergence(sample).r_statistic == 3

    def test_class_order(self, toy_csv):
        """Test class_pair decides which class is X."""
        sample = load_labeled_csv(DatasetSpec(path=toy_csv, label_column="label", class_pair=("b", "a")))
        assert sample.x_points.points.tolist() == [[1.0, 0.0], [3.0, 0.0]]

    def test_missing_label_column(self, toy_csv):
        """Test the schema error names the column."""
        with pytest.raises(SchemaError, match="klass"):
            load_labeled_csv(DatasetSpec(path=toy_csv, label_column="klass", class_pair=("a", "b")))

    def test_missing_feature_column(self, toy_csv):
        """Test unknown feature columns."""
        with pytest.raises(SchemaError):
            load_labeled_csv(DatasetSpec(path=toy_csv, label_column="label", feature_columns=["x", "z"],
                                         class_pair=("a", "b")))

    def test_non_numeric_cell(self, tmp_path):
        """Test the parse error reports file row and column."""
        path = write(tmp_path / "bad.csv", "x,y,label\n0,0,a\n2,oops,a\n1,0,b\n")
        with pytest.raises(ParseError) as caught:
            load_labeled_csv(DatasetSpec(path=path, label_column="label", class_pair=("a", "b")))
        assert caught.value.row == 3
        assert caught.value.column == "y"

    def test_empty_cell(self, tmp_path):
        """Test an empty feature cell is a parse error."""
        path = write(tmp_path / "gap.csv", "x,y,label\n0,,a\n1,0,b\n")
        with pytest.raises(ParseError):
            load_labeled_csv(DatasetSpec(path=path, label_column="label", class_pair=("a", "b")))

    def test_single_class(self, toy_csv):
        """Test fewer than two selected classes."""
        with pytest.raises(DataError):
            load_labeled_csv(DatasetSpec(path=toy_csv, label_column="label", class_pair=("a", "c")))

    def test_missing_file(self, tmp_path):
        """Test a missing file is a data error."""
        with pytest.raises(DataError):
            load_labeled_csv(DatasetSpec(path=str(tmp_path / "none.csv"), label_column=0, class_pair=("a", "b")))

    def test_other_classes_ignored(self, tmp_path):
        """Test rows of unselected classes are dropped."""
        path = write(tmp_path / "three.csv", "f,label\n1,a\n2,c\n3,b\n4,c\n")
        sample = load_labeled_csv(DatasetSpec(path=path, label_column="label", class_pair=("a", "b")))
        assert (sample.m, sample.n, sample.dim) == (1, 1, 1)

    def test_no_header_indices(self, tmp_path):
        """Test positional columns without a header row."""
        path = write(tmp_path / "plain.csv", "1;0.5;0.25\n2;1.5;0.75\n1;2.5;1.25\n")
        spec = DatasetSpec(path=path, label_column=0, feature_columns=[2], class_pair=("1", "2"), has_header=False)
        sample = load_labeled_csv(spec)
        assert sample.x_points.points.tolist() == [[0.25], [1.25]]
        assert sample.y_points.points.tolist() == [[0.75]]

    def test_digit_string_index(self, tmp_path):
        """Test an index given as a string selects a column by position."""
        path = write(tmp_path / "plain.csv", "1,0.5\n2,1.5\n")
        spec = DatasetSpec(path=path, label_column="0", class_pair=("1", "2"), has_header=False)
        assert load_labeled_csv(spec).total == 2

    def test_subsample(self, tmp_path):
        """Test max_rows_per_class on a 10^4-row file is exact and seeded."""
        rng = np.random.default_rng(0)
        frame = pd.DataFrame(rng.random((10000, 3)), columns=["a", "b", "c"])
        frame["label"] = np.where(np.arange(10000) % 2 == 0, "p", "q")
        path = tmp_path / "big.csv"
        frame.to_csv(path, index=False)

        def load(seed):
            return load_labeled_csv(DatasetSpec(path=str(path), label_column="label", class_pair=("p", "q"),
                                                max_rows_per_class=600, seed=seed))

        first = load(4)
        assert (first.m, first.n) == (600, 600)
        assert np.array_equal(first.x_points.points, load(4).x_points.points)
        assert not np.array_equal(first.x_points.points, load(5).x_points.points)

    def test_normalize_unit_cube(self, tmp_path):
        """Test features are rescaled to [0, 1] over both classes."""
        path = write(tmp_path / "n.csv", "f,g,label\n0,10,a\n5,20,a\n10,30,b\n")
        spec = DatasetSpec(path=path, label_column="label", class_pair=("a", "b"), normalize="unit-cube")
        points, _ = load_labeled_csv(spec).merged()
        assert points.min(axis=0).tolist() == [0.0, 0.0]
        assert points.max(axis=0).tolist() == [1.0, 1.0]

    def test_normalize_z_score(self, tmp_path):
        """Test features are centred and scaled."""
        path = write(tmp_path / "z.csv", "f,label\n1,a\n2,a\n3,b\n6,b\n")
        spec = DatasetSpec(path=path, label_column="label", class_pair=("a", "b"), normalize="z-score")
        points, _ = load_labeled_csv(spec).merged()
        assert points.mean() == pytest.approx(0.0, abs=1e-12)
        assert points.std() == pytest.approx(1.0)

    def test_dedupe(self, tmp_path):
        """Test repeated feature rows are dropped, first occurrence kept."""
        path = write(tmp_path / "d.csv", "f,label\n1,a\n1,b\n2,a\n3,b\n")
        spec = DatasetSpec(path=path, label_column="label", class_pair=("a", "b"), dedupe=True)
        sample = load_labeled_csv(spec)
        assert sample.x_points.points.ravel().tolist() == [1.0, 2.0]
        assert sample.y_points.points.ravel().tolist() == [3.0]

    def test_jitter(self, toy_csv):
        """Test seeded jitter moves every point slightly."""
        spec = DatasetSpec(path=toy_csv, label_column="label", class_pair=("a", "b"), jitter=1e-3, seed=2)
        points, _ = load_labeled_csv(spec).merged()
        original = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [3.0, 0.0]])
        assert not np.array_equal(points, original)
        assert np.allclose(points, original, atol=0.01)


class TestDelimiter:
    """Test delimiter detection."""

    @pytest.mark.parametrize("delimiter", [",", ";", "\t"])
    def test_detect(self, tmp_path, delimiter):
        """Test each supported delimiter."""
        path = write(tmp_path / "d.txt", delimiter.join(["f", "g", "label"]) + "\n")
        assert detect_delimiter(path) == delimiter

    def test_semicolon_file(self, tmp_path):
        """Test a semicolon file loads without an explicit delimiter."""
        path = write(tmp_path / "s.csv", "f;label\n0.5;a\n1.5;b\n")
        assert load_labeled_csv(DatasetSpec(path=path, label_column="label", class_pair=("a", "b"))).total == 2

    def test_quoted_commas_in_header(self, tmp_path):
        """Test commas inside quoted header fields do not outvote the semicolons."""
        path = write(tmp_path / "q.csv", '"len,cm";"wid,cm";label\n1.5;2.5;a\n3.5;1.0;b\n')
        assert detect_delimiter(path) == ";"
        sample = load_labeled_csv(DatasetSpec(path=path, label_column="label", feature_columns=["len,cm", "wid,cm"],
                                              class_pair=("a", "b")))
        assert sample.x_points.points.tolist() == [[1.5, 2.5]]
        assert sample.y_points.points.tolist() == [[3.5, 1.0]]

    def test_single_column_defaults_to_comma(self, tmp_path):
        """Test a file without any candidate delimiter."""
        path = write(tmp_path / "one.csv", "label\na\nb\n")
        assert detect_delimiter(path) == ","


class TestRoundTrip:
    """Test writing and reloading samples."""

    def test_exact(self, tmp_path):
        """Test 17 significant digits reload bit for bit."""
        rng = np.random.default_rng(17)
        sample = LabeledPointSet.from_arrays(rng.normal(size=(30, 3)) * 1e-7, rng.normal(size=(20, 3)) * 1e5)
        spec = write_labeled_csv(sample, tmp_path / "round.csv")
        again = load_labeled_csv(spec)
        assert np.array_equal(again.x_points.points, sample.x_points.points)
        assert np.array_equal(again.y_points.points, sample.y_points.points)

    def test_names(self, tmp_path):
        """Test custom label and feature names."""
        sample = LabeledPointSet.from_arrays([[1.0, 2.0]], [[3.0, 4.0]])
        spec = write_labeled_csv(sample, tmp_path / "n.csv", label_names=("cat", "dog"), feature_names=["u", "v"])
        assert spec.class_pair == ("cat", "dog")
        assert (tmp_path / "n.csv").read_text().splitlines()[0] == "u,v,label"
        with pytest.raises(DataError):
            write_labeled_csv(sample, tmp_path / "m.csv", feature_names=["u"])


class TestSweeps:
    """Test the feature and sample-size sweeps."""

    def test_feature_sweep_last_is_full(self, rng):
        """Test the last entry uses every feature."""
        sample = LabeledPointSet.from_arrays(rng.random((30, 4)), rng.random((30, 4)) + 0.2)
        estimates = feature_sweep(sample)
        assert len(estimates) == 4
        assert estimates[-1] == estimate_divergence(sample)

    def test_feature_sweep_frame(self, rng):
        """Test the tabular form."""
        sample = LabeledPointSet.from_arrays(rng.random((10, 3)), rng.random((10, 3)))
        frame = feature_sweep_frame(sample, 2)
        assert frame["features"].tolist() == [1, 2]

    def test_feature_sweep_too_far(self, rng):
        """Test sweeping past the available features."""
        sample = LabeledPointSet.from_arrays(rng.random((5, 2)), rng.random((5, 2)))
        with pytest.raises(DataError):
            feature_sweep(sample, 3)

    def test_sample_size_sweep(self, rng):
        """Test one row per size with error bars from disjoint parts."""
        sample = LabeledPointSet.from_arrays(rng.normal(size=(120, 2)), rng.normal(size=(100, 2)) + 3.0)
        frame = sample_size_sweep(sample, [10, 25], parts=4, seed=1)
        assert frame["size"].tolist() == [10, 25]
        assert (frame["se_d_hat"] > 0).all()
        single = sample_size_sweep(sample, [50], parts=1, seed=1)
        assert single["se_d_hat"].tolist() == [0.0]

    def test_sample_size_sweep_too_large(self, rng):
        """Test sizes the smaller class cannot supply."""
        sample = LabeledPointSet.from_arrays(rng.random((20, 2)), rng.random((10, 2)))
        with pytest.raises(DataError):
            sample_size_sweep(sample, [6], parts=2)
