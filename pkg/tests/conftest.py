import math
import random

import pytest

from pipesynth.tabular import Column, ColumnKind, Dataset, TaskKind


def make_column(name, kind, values):
    return Column(name=name, kind=kind, values=tuple(values))


def make_dataset(columns, target_names=("y",), task=TaskKind.CLASSIFICATION):
    return Dataset(columns=tuple(columns), target_names=tuple(target_names), task=task)


def knuth_poisson(rng, lam=4.0):
    limit = math.exp(-lam)
    k, p = 0, 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return float(k)
        k += 1


@pytest.fixture
def crafted_dataset():
    """Six columns: two constants, a uniform sample, a Poisson(4) sample,
    an integer ramp, and a balanced binary target. The expected
    meta-features for this dataset are frozen in test_metafeatures."""
    rng = random.Random(123)
    n = 240
    poisson = [knuth_poisson(rng) for _ in range(n)]
    uniform = [rng.uniform(0.0, 10.0) for _ in range(n)]
    cols = [
        make_column("const_a", ColumnKind.NUMBER_CATEGORY, [5.0] * n),
        make_column("const_b", ColumnKind.NUMBER_CATEGORY, [0.0] * n),
        make_column("uniform_col", ColumnKind.NUMERIC, uniform),
        make_column("poisson_col", ColumnKind.NUMBER_CATEGORY, poisson),
        make_column("ramp", ColumnKind.NUMERIC, [float(i) for i in range(n)]),
        make_column("y", ColumnKind.NUMBER_CATEGORY, [float(i % 2) for i in range(n)]),
    ]
    return make_dataset(cols)


def random_dataset(rng, max_rows=40, max_cols=5):
    """Small random dataset with a mix of column kinds, for property tests."""
    n = rng.randint(4, max_rows)
    n_num = rng.randint(1, max_cols)
    columns = []
    for i in range(n_num):
        vals = [rng.uniform(-100, 100) if rng.random() > 0.1 else None for _ in range(n)]
        columns.append(make_column(f"num{i}", ColumnKind.NUMERIC, vals))
    if rng.random() < 0.5:
        cats = ["red", "green", "blue"]
        columns.append(make_column(
            "cat0", ColumnKind.STRING_CATEGORY,
            [rng.choice(cats) if rng.random() > 0.1 else None for _ in range(n)]))
    columns.append(make_column("y", ColumnKind.NUMBER_CATEGORY,
                               [float(rng.randint(0, 1)) for _ in range(n)]))
    return make_dataset(columns)
