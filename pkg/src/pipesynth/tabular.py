"""Tabular dataset loading, per-column kind inference, and row splitting.

A loaded dataset is immutable: cells are plain Python values (None for
missing, float for numbers, str for everything else) and every mutating
operation returns a new Dataset.
"""

from __future__ import annotations

import csv
import logging
import math
import random
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence

from .errors import DegenerateSplit, EmptyFile, DataError, MissingTarget, RaggedRows

log = logging.getLogger(__name__)


class ColumnKind(str, Enum):
    NUMERIC = "numeric"
    NUMBER_CATEGORY = "number_category"
    STRING_CATEGORY = "string_category"
    TEXT = "text"
    DATE = "date"


#: kinds whose cells are numbers (None for missing)
NUMBER_VALUED = (ColumnKind.NUMERIC, ColumnKind.NUMBER_CATEGORY)


class TaskKind(str, Enum):
    CLASSIFICATION = "classification"
    REGRESSION = "regression"


@dataclass(frozen=True)
class KindConfig:
    """Thresholds for column kind inference.

    The boundaries between continuous numeric / number-categorical and
    between free text / string-categorical are conventions, not part of
    the data; expose them so callers can retune.
    """

    missing_markers: tuple[str, ...] = ("", "na", "nan", "null")
    numcat_max_distinct: int = 20
    numcat_max_distinct_ratio: float = 0.05
    text_min_mean_tokens: float = 3.0
    text_min_distinct_ratio: float = 0.5
    date_min_fraction: float = 0.9


DEFAULT_KIND_CONFIG = KindConfig()

_DATE_PATTERNS = (
    re.compile(r"^\d{4}-\d{2}-\d{2}([ T]\d{2}:\d{2}(:\d{2}(\.\d+)?)?Z?)?$"),  # ISO 8601
    re.compile(r"^\d{1,2}/\d{1,2}/\d{4}$"),  # MM/DD/YYYY
    re.compile(r"^\d{1,2}-\d{1,2}-\d{4}$"),  # DD-MM-YYYY
)


@dataclass(frozen=True)
class Column:
    name: str
    kind: ColumnKind
    values: tuple  # None | float | str, one entry per row

    def has_missing(self) -> bool:
        return any(v is None for v in self.values)

    def non_missing(self) -> list:
        return [v for v in self.values if v is not None]


@dataclass(frozen=True)
class Dataset:
    columns: tuple[Column, ...]
    target_names: tuple[str, ...]
    task: TaskKind

    @property
    def n_rows(self) -> int:
        return len(self.columns[0].values) if self.columns else 0

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def feature_columns(self) -> tuple[Column, ...]:
        return tuple(c for c in self.columns if c.name not in self.target_names)

    @property
    def target_columns(self) -> tuple[Column, ...]:
        return tuple(c for c in self.columns if c.name in self.target_names)


def _is_missing(raw: str, markers: tuple[str, ...]) -> bool:
    return raw.strip().lower() in markers


def _parse_number(raw: str) -> Optional[float]:
    try:
        value = float(raw.strip())
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _is_date(raw: str) -> bool:
    s = raw.strip()
    return any(p.match(s) for p in _DATE_PATTERNS)


def infer_column_kind(cells: Sequence[str], config: KindConfig = DEFAULT_KIND_CONFIG) -> ColumnKind:
    """Classify a column of raw CSV strings into one of the five kinds.

    Order of checks: date, number, string. The decision depends only on
    the multiset of cells, never on row order.
    """
    present = [c for c in cells if not _is_missing(c, config.missing_markers)]
    n_rows = len(cells)
    if not present:
        log.warning("column with no non-missing cells, defaulting to string_category")
        return ColumnKind.STRING_CATEGORY

    if sum(1 for c in present if _is_date(c)) >= config.date_min_fraction * len(present):
        return ColumnKind.DATE

    numbers = [_parse_number(c) for c in present]
    if all(v is not None for v in numbers):
        distinct = len(set(numbers))
        if distinct <= config.numcat_max_distinct or distinct / n_rows <= config.numcat_max_distinct_ratio:
            return ColumnKind.NUMBER_CATEGORY
        return ColumnKind.NUMERIC

    mean_tokens = sum(len(c.split()) for c in present) / len(present)
    distinct_ratio = len(set(present)) / n_rows
    if mean_tokens > config.text_min_mean_tokens or distinct_ratio > config.text_min_distinct_ratio:
        return ColumnKind.TEXT
    return ColumnKind.STRING_CATEGORY


def _convert_cells(raw_cells: list[str], kind: ColumnKind, config: KindConfig) -> tuple:
    out = []
    for raw in raw_cells:
        if _is_missing(raw, config.missing_markers):
            out.append(None)
        elif kind in NUMBER_VALUED:
            value = _parse_number(raw)
            # a non-parsable stray cell in a numeric column is treated as missing
            if value is None:
                log.warning("non-numeric cell %r in numeric column, treated as missing", raw)
            out.append(value)
        else:
            out.append(raw)
    return tuple(out)


def _resolve_task(target_cols: list[Column], hint: Optional[TaskKind]) -> TaskKind:
    numeric = all(c.kind == ColumnKind.NUMERIC for c in target_cols)
    number_valued = all(c.kind in NUMBER_VALUED for c in target_cols)
    if hint is not None:
        if hint == TaskKind.REGRESSION and not number_valued:
            names = [c.name for c in target_cols if c.kind not in NUMBER_VALUED]
            raise DataError(f"regression requires numeric targets, but {names} are not number-valued")
        return hint
    if numeric:
        return TaskKind.REGRESSION
    # number-categorical, string-categorical, and any other discrete target
    return TaskKind.CLASSIFICATION


def load_csv(
    path: str,
    target_names: Sequence[str],
    task_hint: Optional[TaskKind] = None,
    delimiter: str = ",",
    config: KindConfig = DEFAULT_KIND_CONFIG,
) -> Dataset:
    """Load a CSV file (RFC 4180, UTF-8, header row) into a Dataset."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read dataset {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path}: file is empty") from None
        rows = []
        for row_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise RaggedRows(f"{path}: row {row_no} has {len(row)} cells, expected {len(header)}")
            rows.append(row)
    if not rows:
        raise EmptyFile(f"{path}: no data rows after the header")

    for t in target_names:
        if t not in header:
            raise MissingTarget(f"{path}: target column {t!r} not found in header")

    columns = []
    for i, name in enumerate(header):
        raw = [r[i] for r in rows]
        kind = infer_column_kind(raw, config)
        columns.append(Column(name=name, kind=kind, values=_convert_cells(raw, kind, config)))

    targets = [c for c in columns if c.name in target_names]
    task = _resolve_task(targets, task_hint)
    return Dataset(columns=tuple(columns), target_names=tuple(target_names), task=task)


def write_csv(dataset: Dataset, path: str, delimiter: str = ",") -> None:
    """Emit a dataset as CSV. Numbers are written with repr() so that a
    reload reproduces the exact same float; missing cells become empty."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow([c.name for c in dataset.columns])
        for i in range(dataset.n_rows):
            row = []
            for c in dataset.columns:
                v = c.values[i]
                if v is None:
                    row.append("")
                elif isinstance(v, float):
                    row.append(repr(v))
                else:
                    row.append(v)
            writer.writerow(row)


def take_rows(dataset: Dataset, indices: Sequence[int]) -> Dataset:
    """Row-subset a dataset, keeping the inferred kinds of the parent."""
    columns = tuple(
        replace(c, values=tuple(c.values[i] for i in indices)) for c in dataset.columns
    )
    return replace(dataset, columns=columns)


def split_rows(dataset: Dataset, ratio: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic shuffled split; the first part gets round(ratio * n) rows."""
    n = dataset.n_rows
    if not 0.0 < ratio < 1.0:
        raise DegenerateSplit(f"split ratio must be in (0, 1), got {ratio}")
    if n < 2:
        raise DegenerateSplit(f"cannot split a dataset with {n} rows")
    n_first = int(round(ratio * n))
    if n_first in (0, n):
        raise DegenerateSplit(f"split of {n} rows at ratio {ratio} would leave one side empty")
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    return take_rows(dataset, indices[:n_first]), take_rows(dataset, indices[n_first:])
