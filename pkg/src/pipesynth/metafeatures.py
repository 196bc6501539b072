"""The 38 dataset-level meta-features and their per-column analogues.

Every feature is a finite real; presence flags are 0/1, counts are
integer-valued floats, fractions live in [0, 1]. The vector is an
ordered dict keyed by the canonical names below, and serializes to a
flat JSON object in that key order.
"""

from __future__ import annotations

import json
import math
from typing import Optional

import numpy as np

from .tabular import Column, ColumnKind, Dataset, NUMBER_VALUED, TaskKind

# canonical order; grouped as: shape (3), missing (1), feature types (10),
# symmetry (4), distribution (6), tendency/dispersion (3), correlation (3),
# outliers (2), value frequency (3), target property (3)
META_FEATURE_GROUPS: dict[str, tuple[str, ...]] = {
    "shape": ("n_rows", "n_features", "n_targets"),
    "missing": ("has_missing",),
    "feature_types": (
        "has_numeric", "has_numcat", "has_strcat", "has_text", "has_date",
        "count_numeric", "count_numcat", "count_strcat", "count_text", "count_date",
    ),
    "symmetry": ("frac_skew_normal", "frac_skew_tailed", "frac_kurt_normal", "frac_kurt_tailed"),
    "distribution": (
        "frac_feat_normal", "frac_feat_uniform", "frac_feat_poisson",
        "target_is_normal", "target_is_uniform", "target_is_poisson",
    ),
    "tendency_dispersion": ("norm_mean", "norm_std", "mean_cv"),
    "correlation": ("corr_min", "corr_max", "corr_count"),
    "outliers": ("outlier_few_count", "outlier_many_count"),
    "value_frequency": ("sparse_count", "imbalanced_count", "dominant_count"),
    "target_property": ("target_imbalanced", "target_continuous", "target_categorical"),
}

META_FEATURES: tuple[str, ...] = tuple(
    name for group in META_FEATURE_GROUPS.values() for name in group
)

#: features with no per-column analogue (dataset-global)
COLUMN_INAPPLICABLE = frozenset(
    ("n_rows", "n_targets")
    + META_FEATURE_GROUPS["correlation"]
    + ("target_is_normal", "target_is_uniform", "target_is_poisson")
    + META_FEATURE_GROUPS["target_property"]
)

MetaFeatureVector = dict  # str -> float, all 38 keys in canonical order

# thresholds; the statistic bands are conventions since only the statistic
# names are fixed by the feature list
SKEW_NORMAL_MAX = 0.5
SKEW_TAILED_MIN = 2.0
KURT_NORMAL_MAX = 1.0
KURT_TAILED_MIN = 3.0
DIST_NORMAL_SKEW_MAX = 0.3
DIST_NORMAL_KURT_MAX = 1.0
UNIFORM_KURT = -1.2     # excess kurtosis of a uniform distribution
UNIFORM_KURT_TOL = 0.3
POISSON_RATIO_TOL = 0.2
OUTLIER_FEW_MAX = 0.01
OUTLIER_MANY_MIN = 0.05
SPARSE_MIN = 0.5
DOMINANT_MIN = 0.8
IMBALANCED_MIN = 0.6
TARGET_IMBALANCE_RATIO = 0.2
CORR_STRONG = 0.8
CORR_MAX_ROWS = 10_000
CORR_MAX_COLS = 50
_EPS = 1e-12


def skewness(values) -> float:
    """Sample skewness g1 = m3 / m2^(3/2) with population moments about
    the mean. Returns 0.0 for degenerate input (n < 3 or zero variance)."""
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        return 0.0
    d = v - v.mean()
    m2 = float(np.mean(d ** 2))
    if m2 == 0.0:
        return 0.0
    m3 = float(np.mean(d ** 3))
    return m3 / m2 ** 1.5


def kurtosis(values) -> float:
    """Excess kurtosis g2 = m4 / m2^2 - 3 (population moments).
    Returns 0.0 for degenerate input."""
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        return 0.0
    d = v - v.mean()
    m2 = float(np.mean(d ** 2))
    if m2 == 0.0:
        return 0.0
    m4 = float(np.mean(d ** 4))
    return m4 / m2 ** 2 - 3.0


def pearson(x, y) -> float:
    """Pearson r, clamped into [-1, 1]. Degenerate input (length < 2 or a
    constant side) yields 0.0 so callers can aggregate without guards.
    Sums use math.fsum, so the result is exactly invariant under row
    permutation of the paired inputs."""
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if xv.size != yv.size or xv.size < 2:
        return 0.0
    dx = xv - math.fsum(xv) / xv.size
    dy = yv - math.fsum(yv) / yv.size
    den = math.sqrt(math.fsum(dx * dx) * math.fsum(dy * dy))
    if den == 0.0:
        return 0.0
    r = math.fsum(dx * dy) / den
    return max(-1.0, min(1.0, r))


def _numeric_cells(col: Column) -> np.ndarray:
    """Non-missing numbers of a number-valued column, sorted so that every
    downstream statistic is a pure function of the cell multiset (exact
    row-permutation invariance); empty for other kinds."""
    if col.kind not in NUMBER_VALUED:
        return np.empty(0)
    return np.sort(np.asarray([v for v in col.values if v is not None], dtype=float))


def _is_degenerate(vals: np.ndarray) -> bool:
    return vals.size < 3 or float(np.var(vals)) == 0.0


def _dist_is_normal(g1: float, g2: float) -> bool:
    return abs(g1) <= DIST_NORMAL_SKEW_MAX and abs(g2) <= DIST_NORMAL_KURT_MAX


def _dist_is_uniform(g1: float, g2: float) -> bool:
    return abs(g2 - UNIFORM_KURT) <= UNIFORM_KURT_TOL and abs(g1) <= DIST_NORMAL_SKEW_MAX


def _dist_is_poisson(vals: np.ndarray) -> bool:
    if vals.size == 0 or np.any(vals < 0) or np.any(vals != np.round(vals)):
        return False
    mean = float(vals.mean())
    if mean <= 0:
        return False
    return abs(float(np.var(vals)) / mean - 1.0) <= POISSON_RATIO_TOL


def _outlier_fraction(vals: np.ndarray) -> float:
    """Fraction of cells outside the 1.5 * IQR fences."""
    if vals.size == 0:
        return 0.0
    q1, q3 = np.percentile(vals, [25, 75])
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    return float(np.mean((vals < lo) | (vals > hi)))


def _minmax_stats(vals: np.ndarray) -> Optional[tuple[float, float]]:
    """(mean, population std) of the column min-max normalized to [0, 1];
    None when the column is constant or empty."""
    if vals.size == 0:
        return None
    lo, hi = float(vals.min()), float(vals.max())
    if hi == lo:
        return None
    norm = (vals - lo) / (hi - lo)
    return float(norm.mean()), float(norm.std())


def _coefficient_of_variation(vals: np.ndarray) -> Optional[float]:
    if vals.size == 0:
        return None
    mean = float(vals.mean())
    if abs(mean) <= _EPS:
        return None
    return float(vals.std()) / abs(mean)


def _zero_empty_fraction(col: Column) -> float:
    """Missing cells, numeric zeros, and empty strings all count as empty."""
    n = len(col.values)
    if n == 0:
        return 0.0
    empty = sum(1 for v in col.values if v is None or v == 0.0 or v == "")
    return empty / n


def _top_value_fraction(col: Column) -> float:
    """Frequency of the most common non-missing value, over non-missing cells."""
    present = col.non_missing()
    if not present:
        return 0.0
    counts: dict = {}
    for v in present:
        counts[v] = counts.get(v, 0) + 1
    return max(counts.values()) / len(present)


def _stride_sample(items: list, limit: int) -> list:
    if len(items) <= limit:
        return items
    stride = math.ceil(len(items) / limit)
    return items[::stride]


def _pairwise_correlations(cols: list[Column], n_rows: int) -> list[float]:
    """Pearson r for every pair of number-valued feature columns, with
    deterministic stride subsampling of rows and columns for tractability.
    Pairs with a degenerate side contribute r = 0."""
    cols = _stride_sample(cols, CORR_MAX_COLS)
    row_idx = _stride_sample(list(range(n_rows)), CORR_MAX_ROWS)
    arrays = []
    for c in cols:
        arrays.append(np.asarray(
            [c.values[i] if c.values[i] is not None else np.nan for i in row_idx], dtype=float
        ))
    out = []
    for i in range(len(arrays)):
        for j in range(i + 1, len(arrays)):
            mask = ~(np.isnan(arrays[i]) | np.isnan(arrays[j]))
            out.append(pearson(arrays[i][mask], arrays[j][mask]))
    return out


def _class_imbalance(col: Column) -> bool:
    present = col.non_missing()
    if not present:
        return False
    counts: dict = {}
    for v in present:
        counts[v] = counts.get(v, 0) + 1
    if len(counts) < 2:
        return False
    return min(counts.values()) / max(counts.values()) <= TARGET_IMBALANCE_RATIO


def compute_meta_features(dataset: Dataset) -> MetaFeatureVector:
    """Compute all 38 meta-features. Pure and deterministic; permuting the
    rows or the columns of the dataset leaves every value unchanged (row
    permutation up to the correlation subsampling limit)."""
    feats = list(dataset.feature_columns)
    targets = list(dataset.target_columns)
    numbered = [c for c in feats if c.kind in NUMBER_VALUED]

    mf: MetaFeatureVector = {}
    mf["n_rows"] = float(dataset.n_rows)
    mf["n_features"] = float(len(feats))
    mf["n_targets"] = float(len(targets))
    mf["has_missing"] = float(any(c.has_missing() for c in feats))

    kind_counts = {k: 0 for k in ColumnKind}
    for c in feats:
        kind_counts[c.kind] += 1
    for short, kind in (
        ("numeric", ColumnKind.NUMERIC),
        ("numcat", ColumnKind.NUMBER_CATEGORY),
        ("strcat", ColumnKind.STRING_CATEGORY),
        ("text", ColumnKind.TEXT),
        ("date", ColumnKind.DATE),
    ):
        mf[f"has_{short}"] = float(kind_counts[kind] > 0)
    for short, kind in (
        ("numeric", ColumnKind.NUMERIC),
        ("numcat", ColumnKind.NUMBER_CATEGORY),
        ("strcat", ColumnKind.STRING_CATEGORY),
        ("text", ColumnKind.TEXT),
        ("date", ColumnKind.DATE),
    ):
        mf[f"count_{short}"] = float(kind_counts[kind])

    skew_normal = skew_tailed = kurt_normal = kurt_tailed = 0
    dist_normal = dist_uniform = dist_poisson = 0
    few_outliers = many_outliers = 0
    norm_means: list[float] = []
    norm_stds: list[float] = []
    cvs: list[float] = []
    for c in numbered:
        vals = _numeric_cells(c)
        if not _is_degenerate(vals):
            g1, g2 = skewness(vals), kurtosis(vals)
            skew_normal += abs(g1) <= SKEW_NORMAL_MAX
            skew_tailed += abs(g1) > SKEW_TAILED_MIN
            kurt_normal += abs(g2) <= KURT_NORMAL_MAX
            kurt_tailed += g2 > KURT_TAILED_MIN
            dist_normal += _dist_is_normal(g1, g2)
            dist_uniform += _dist_is_uniform(g1, g2)
            dist_poisson += _dist_is_poisson(vals)
        frac = _outlier_fraction(vals)
        few_outliers += 0.0 < frac <= OUTLIER_FEW_MAX
        many_outliers += frac > OUTLIER_MANY_MIN
        stats = _minmax_stats(vals)
        if stats is not None:
            norm_means.append(stats[0])
            norm_stds.append(stats[1])
        cv = _coefficient_of_variation(vals)
        if cv is not None:
            cvs.append(cv)

    n_num = len(numbered)
    mf["frac_skew_normal"] = skew_normal / n_num if n_num else 0.0
    mf["frac_skew_tailed"] = skew_tailed / n_num if n_num else 0.0
    mf["frac_kurt_normal"] = kurt_normal / n_num if n_num else 0.0
    mf["frac_kurt_tailed"] = kurt_tailed / n_num if n_num else 0.0
    mf["frac_feat_normal"] = dist_normal / n_num if n_num else 0.0
    mf["frac_feat_uniform"] = dist_uniform / n_num if n_num else 0.0
    mf["frac_feat_poisson"] = dist_poisson / n_num if n_num else 0.0

    num_targets = [c for c in targets if c.kind in NUMBER_VALUED]
    def _all_targets(pred) -> float:
        if not num_targets or len(num_targets) != len(targets):
            return 0.0
        return float(all(pred(_numeric_cells(c)) for c in num_targets))

    mf["target_is_normal"] = _all_targets(
        lambda v: not _is_degenerate(v) and _dist_is_normal(skewness(v), kurtosis(v)))
    mf["target_is_uniform"] = _all_targets(
        lambda v: not _is_degenerate(v) and _dist_is_uniform(skewness(v), kurtosis(v)))
    mf["target_is_poisson"] = _all_targets(_dist_is_poisson)

    # fsum keeps the averages exactly invariant to column order
    mf["norm_mean"] = math.fsum(norm_means) / len(norm_means) if norm_means else 0.0
    mf["norm_std"] = math.fsum(norm_stds) / len(norm_stds) if norm_stds else 0.0
    mf["mean_cv"] = math.fsum(cvs) / len(cvs) if cvs else 0.0

    correlations = _pairwise_correlations(numbered, dataset.n_rows)
    mf["corr_min"] = min(correlations) if correlations else 0.0
    mf["corr_max"] = max(correlations) if correlations else 0.0
    mf["corr_count"] = float(sum(1 for r in correlations if abs(r) >= CORR_STRONG))

    mf["outlier_few_count"] = float(few_outliers)
    mf["outlier_many_count"] = float(many_outliers)

    sparse = imbalanced = dominant = 0
    for c in feats:
        sparse += _zero_empty_fraction(c) >= SPARSE_MIN
        top = _top_value_fraction(c)
        dominant += top >= DOMINANT_MIN
        imbalanced += IMBALANCED_MIN <= top < DOMINANT_MIN
    mf["sparse_count"] = float(sparse)
    mf["imbalanced_count"] = float(imbalanced)
    mf["dominant_count"] = float(dominant)

    if dataset.task == TaskKind.CLASSIFICATION:
        mf["target_imbalanced"] = float(any(_class_imbalance(c) for c in targets))
    else:
        mf["target_imbalanced"] = 0.0
    mf["target_continuous"] = float(dataset.task == TaskKind.REGRESSION)
    mf["target_categorical"] = float(dataset.task == TaskKind.CLASSIFICATION)

    assert tuple(mf.keys()) == META_FEATURES
    return mf


def column_feature_value(col: Column, name: str) -> Optional[float]:
    """Per-column analogue of a meta-feature, used for relevant-column
    inference: presence/count features become the column predicate,
    statistic features are computed on the single column, dataset-global
    features have no analogue (None)."""
    if name in COLUMN_INAPPLICABLE:
        return None
    if name == "n_features":
        return 1.0
    if name == "has_missing":
        return float(col.has_missing())
    kind_map = {
        "numeric": ColumnKind.NUMERIC,
        "numcat": ColumnKind.NUMBER_CATEGORY,
        "strcat": ColumnKind.STRING_CATEGORY,
        "text": ColumnKind.TEXT,
        "date": ColumnKind.DATE,
    }
    for prefix in ("has_", "count_"):
        if name.startswith(prefix) and name[len(prefix):] in kind_map:
            return float(col.kind == kind_map[name[len(prefix):]])

    vals = _numeric_cells(col)
    if name in ("frac_skew_normal", "frac_skew_tailed", "frac_kurt_normal", "frac_kurt_tailed",
                "frac_feat_normal", "frac_feat_uniform", "frac_feat_poisson"):
        if _is_degenerate(vals):
            return 0.0
        g1, g2 = skewness(vals), kurtosis(vals)
        return float({
            "frac_skew_normal": abs(g1) <= SKEW_NORMAL_MAX,
            "frac_skew_tailed": abs(g1) > SKEW_TAILED_MIN,
            "frac_kurt_normal": abs(g2) <= KURT_NORMAL_MAX,
            "frac_kurt_tailed": g2 > KURT_TAILED_MIN,
            "frac_feat_normal": _dist_is_normal(g1, g2),
            "frac_feat_uniform": _dist_is_uniform(g1, g2),
            "frac_feat_poisson": _dist_is_poisson(vals),
        }[name])
    if name == "norm_mean":
        stats = _minmax_stats(vals)
        return stats[0] if stats else 0.0
    if name == "norm_std":
        stats = _minmax_stats(vals)
        return stats[1] if stats else 0.0
    if name == "mean_cv":
        cv = _coefficient_of_variation(vals)
        return cv if cv is not None else 0.0
    if name == "outlier_few_count":
        frac = _outlier_fraction(vals)
        return float(0.0 < frac <= OUTLIER_FEW_MAX)
    if name == "outlier_many_count":
        return float(_outlier_fraction(vals) > OUTLIER_MANY_MIN)
    if name == "sparse_count":
        return float(_zero_empty_fraction(col) >= SPARSE_MIN)
    if name == "imbalanced_count":
        top = _top_value_fraction(col)
        return float(IMBALANCED_MIN <= top < DOMINANT_MIN)
    if name == "dominant_count":
        return float(_top_value_fraction(col) >= DOMINANT_MIN)
    raise KeyError(f"not a meta-feature: {name}")


FLAG_FEATURES = frozenset(
    name for name in META_FEATURES
    if name.startswith("has_") or name.startswith("target_")
)
COUNT_FEATURES = frozenset(
    ("n_rows", "n_features", "n_targets", "corr_count")
    + tuple(n for n in META_FEATURES if n.startswith("count_") or n.endswith("_count"))
)
FRACTION_FEATURES = frozenset(n for n in META_FEATURES if n.startswith("frac_"))


def validate_meta_vector(mf: MetaFeatureVector) -> None:
    """Raise ValueError unless all 38 keys are present, finite, and typed
    per their group (flags 0/1, counts integral and non-negative,
    fractions in [0, 1])."""
    if tuple(mf.keys()) != META_FEATURES:
        missing = set(META_FEATURES) - set(mf.keys())
        extra = set(mf.keys()) - set(META_FEATURES)
        raise ValueError(f"bad meta-feature keys (missing={sorted(missing)}, extra={sorted(extra)})")
    for name, value in mf.items():
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ValueError(f"{name}: non-finite value {value!r}")
        if name in FLAG_FEATURES and value not in (0.0, 1.0):
            raise ValueError(f"{name}: flag must be 0 or 1, got {value}")
        if name in COUNT_FEATURES and (value < 0 or value != int(value)):
            raise ValueError(f"{name}: count must be a non-negative integer, got {value}")
        if name in FRACTION_FEATURES and not 0.0 <= value <= 1.0:
            raise ValueError(f"{name}: fraction out of [0, 1]: {value}")
    if mf["corr_min"] > mf["corr_max"]:
        raise ValueError("corr_min exceeds corr_max")


def to_json(mf: MetaFeatureVector) -> str:
    return json.dumps(mf)


def from_json(text: str) -> MetaFeatureVector:
    raw = json.loads(text)
    mf = {name: float(raw[name]) for name in META_FEATURES if name in raw}
    validate_meta_vector(mf)
    return mf
