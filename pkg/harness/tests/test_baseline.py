import csv

import pytest

from pipeline_harness.baseline import default_baseline_score


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return str(path)


class TestClassificationBaseline:
    def test_most_frequent_label_macro_f1(self, tmp_path):
        train = write_csv(tmp_path / "train.csv", ["x", "label"],
                          [[i, 0] for i in range(7)] + [[i, 1] for i in range(3)])
        test = write_csv(tmp_path / "test.csv", ["x", "label"],
                         [[i, 0] for i in range(6)] + [[i, 1] for i in range(4)])
        score = default_baseline_score(train, test, "label", "classification")
        # predicts the majority class 0: F1(0) = 12/16, F1(1) = 0
        assert score == pytest.approx(0.375, abs=1e-12)

    def test_string_labels(self, tmp_path):
        train = write_csv(tmp_path / "train.csv", ["x", "label"],
                          [[i, "no"] for i in range(8)] + [[i, "yes"] for i in range(2)])
        test = write_csv(tmp_path / "test.csv", ["x", "label"],
                         [[0, "no"], [1, "no"], [2, "yes"]])
        score = default_baseline_score(train, test, "label", "classification")
        # F1(no) = 2*2/(2*2+1+0) = 0.8, F1(yes) = 0
        assert score == pytest.approx(0.4, abs=1e-12)


class TestRegressionBaseline:
    def test_mean_predictor_r2(self, tmp_path):
        train = write_csv(tmp_path / "train.csv", ["x", "y"],
                          [[0, 1.0], [1, 2.0], [2, 3.0]])
        test = write_csv(tmp_path / "test.csv", ["x", "y"], [[0, 2.0], [1, 4.0]])
        score = default_baseline_score(train, test, "y", "regression")
        # predicts 2.0: SSres = 4, SStot = 2 -> R2 = -1
        assert score == pytest.approx(-1.0, abs=1e-12)

    def test_perfect_mean_match(self, tmp_path):
        train = write_csv(tmp_path / "train.csv", ["x", "y"], [[0, 5.0], [1, 5.0]])
        test = write_csv(tmp_path / "test.csv", ["x", "y"], [[0, 4.0], [1, 6.0]])
        score = default_baseline_score(train, test, "y", "regression")
        assert score == pytest.approx(0.0, abs=1e-12)
