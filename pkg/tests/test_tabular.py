import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pipesynth.errors import DegenerateSplit, EmptyFile, MissingTarget, RaggedRows
from pipesynth.tabular import (
    ColumnKind,
    TaskKind,
    infer_column_kind,
    load_csv,
    split_rows,
    write_csv,
)


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestLoadCsv:
    def test_three_row_classification(self, tmp_path):
        path = write(tmp_path, "a,y\n1,0\n2,1\n3,0\n")
        ds = load_csv(path, ["y"])
        assert ds.n_rows == 3
        assert ds.task == TaskKind.CLASSIFICATION
        assert ds.column("a").kind == ColumnKind.NUMBER_CATEGORY

    def test_missing_target(self, tmp_path):
        path = write(tmp_path, "a,b\n1,2\n")
        with pytest.raises(MissingTarget, match="'y'"):
            load_csv(path, ["y"])

    def test_ragged_rows_names_row(self, tmp_path):
        path = write(tmp_path, "a,y\n1,0\n2\n")
        with pytest.raises(RaggedRows, match="row 3"):
            load_csv(path, ["y"])

    def test_empty_file(self, tmp_path):
        with pytest.raises(EmptyFile):
            load_csv(write(tmp_path, ""), ["y"])
        with pytest.raises(EmptyFile):
            load_csv(write(tmp_path, "a,y\n"), ["y"])

    def test_continuous_target_is_regression(self, tmp_path):
        rows = "\n".join(f"{i},{i * 1.37}" for i in range(50))
        ds = load_csv(write(tmp_path, "a,y\n" + rows + "\n"), ["y"])
        assert ds.task == TaskKind.REGRESSION

    def test_task_hint_wins(self, tmp_path):
        path = write(tmp_path, "a,y\n1,0\n2,1\n3,0\n")
        ds = load_csv(path, ["y"], task_hint=TaskKind.REGRESSION)
        assert ds.task == TaskKind.REGRESSION

    def test_missing_markers(self, tmp_path):
        path = write(tmp_path, "a,y\n1,0\nNA,1\nnull,0\nNaN,1\n,0\n")
        ds = load_csv(path, ["y"])
        assert [v is None for v in ds.column("a").values] == [False, True, True, True, True]


class TestKindInference:
    def test_many_distinct_floats_numeric(self):
        cells = [f"{i * 1.5 + 0.1}" for i in range(200)]
        assert infer_column_kind(cells) == ColumnKind.NUMERIC

    def test_low_cardinality_strings(self):
        # 4 distinct values over 1000 rows, like a card-network column
        cells = (["visa", "mastercard", "amex", "discover"] * 250)
        assert infer_column_kind(cells) == ColumnKind.STRING_CATEGORY

    def test_long_text(self):
        # mean whitespace-token count 12 > 3
        cells = ["the quick brown fox jumps over the lazy dog again and again"] * 30
        assert sum(len(c.split()) for c in cells) / len(cells) == 12
        assert infer_column_kind(cells) == ColumnKind.TEXT

    def test_low_cardinality_integers(self):
        assert infer_column_kind(["1", "2", "3", "1", "2"]) == ColumnKind.NUMBER_CATEGORY

    @pytest.mark.parametrize("cells", [
        ["2021-05-01", "2020-11-30", "1999-01-02"],
        ["12/31/2020", "1/2/1999", "06/15/2010"],
        ["31-12-2020", "2-1-1999", "15-06-2010"],
        ["2021-05-01 10:30", "2020-11-30T23:59:59", "1999-01-02"],
    ])
    def test_dates(self, cells):
        assert infer_column_kind(cells * 5) == ColumnKind.DATE

    def test_date_needs_ninety_percent(self):
        cells = ["2021-05-01"] * 8 + ["not a date"] * 2
        assert infer_column_kind(cells) != ColumnKind.DATE

    def test_all_missing_defaults_to_strcat(self):
        assert infer_column_kind(["", "NA", "nan"]) == ColumnKind.STRING_CATEGORY

    def test_order_insensitive(self):
        cells = [f"{i * 1.5}" for i in range(100)] + ["x"]
        assert infer_column_kind(cells) == infer_column_kind(list(reversed(cells)))


class TestSplitRows:
    def test_sizes(self, tmp_path):
        rows = "\n".join(f"{i},{i % 2}" for i in range(100))
        ds = load_csv(write(tmp_path, "a,y\n" + rows + "\n"), ["y"])
        first, second = split_rows(ds, 0.75, seed=7)
        assert (first.n_rows, second.n_rows) == (75, 25)

    def test_deterministic(self, tmp_path):
        rows = "\n".join(f"{i},{i % 2}" for i in range(60))
        ds = load_csv(write(tmp_path, "a,y\n" + rows + "\n"), ["y"])
        a1, b1 = split_rows(ds, 0.6, seed=3)
        a2, b2 = split_rows(ds, 0.6, seed=3)
        assert a1.column("a").values == a2.column("a").values
        assert b1.column("a").values == b2.column("a").values

    def test_four_rows(self, tmp_path):
        ds = load_csv(write(tmp_path, "a,y\n1,0\n2,1\n3,0\n4,1\n"), ["y"])
        first, second = split_rows(ds, 0.75, seed=0)
        assert (first.n_rows, second.n_rows) == (3, 1)

    def test_degenerate(self, tmp_path):
        ds = load_csv(write(tmp_path, "a,y\n1,0\n2,1\n"), ["y"])
        with pytest.raises(DegenerateSplit):
            split_rows(ds, 0.95, seed=0)

    @given(n=st.integers(2, 200), ratio=st.floats(0.05, 0.95), seed=st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_partition_property(self, n, ratio, seed, tmp_path_factory):
        from tests.conftest import make_column, make_dataset
        from pipesynth.tabular import ColumnKind

        ds = make_dataset([
            make_column("a", ColumnKind.NUMERIC, [float(i) for i in range(n)]),
            make_column("y", ColumnKind.NUMBER_CATEGORY, [float(i % 2) for i in range(n)]),
        ])
        try:
            first, second = split_rows(ds, ratio, seed)
        except DegenerateSplit:
            n_first = int(round(ratio * n))
            assert n_first in (0, n)
            return
        seen = sorted(first.column("a").values) + sorted(second.column("a").values)
        assert sorted(seen) == [float(i) for i in range(n)]
        assert first.n_rows == int(round(ratio * n))


class TestRoundTrip:
    def test_numbers_and_text_bit_exact(self, tmp_path):
        from tests.conftest import make_column, make_dataset

        numbers = [0.1, 1e-17, 123456789.123456789, -2.5000000000000004, 3.0]
        text = ["plain", "with,comma", 'with "quotes"', "trailing space ", "ünicode"]
        ds = make_dataset([
            make_column("num", ColumnKind.NUMERIC, numbers),
            make_column("txt", ColumnKind.TEXT, text),
            make_column("y", ColumnKind.NUMBER_CATEGORY, [0.0, 1.0, 0.0, 1.0, 0.0]),
        ])
        path = tmp_path / "roundtrip.csv"
        write_csv(ds, str(path))
        back = load_csv(str(path), ["y"])
        assert list(back.column("num").values) == numbers
        assert list(back.column("txt").values) == text

    def test_missing_round_trips(self, tmp_path):
        from tests.conftest import make_column, make_dataset

        ds = make_dataset([
            make_column("num", ColumnKind.NUMERIC, [1.5, None, 2.5, None]),
            make_column("y", ColumnKind.NUMBER_CATEGORY, [0.0, 1.0, 0.0, 1.0]),
        ])
        path = tmp_path / "missing.csv"
        write_csv(ds, str(path))
        back = load_csv(str(path), ["y"])
        assert list(back.column("num").values) == [1.5, None, 2.5, None]
