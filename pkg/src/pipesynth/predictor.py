"""Skeleton predictor: per-FE binary decision trees with point-biserial
feature selection, a logistic-regression + linear-SVM model ranker, and
decision-path relevant-column inference.

Training is deterministic given the seed and invariant to corpus record
order: split candidates come from sorted distinct values, all counts are
integer-exact, and cross-validation folds are assigned after sorting the
records by content.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import random
from dataclasses import asdict, dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .corpus import MetaCorpus, Taxonomy, load_taxonomy
from .errors import EmptyPath, InsufficientModels, OneClassOnly
from .metafeatures import META_FEATURES, MetaFeatureVector, column_feature_value
from .tabular import ColumnKind, Dataset, TaskKind

log = logging.getLogger(__name__)

_GAIN_TOL = 1e-12


def point_biserial(x, y) -> float:
    """Point-biserial correlation between a real vector and a 0/1 vector:

        r_pb = (mean(x|y=1) - mean(x|y=0)) / s_x * sqrt(p * (1 - p))

    with s_x the population std and p the positive fraction. Equals the
    Pearson correlation of x with y. Degenerate input yields 0.0."""
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if xv.size != yv.size or xv.size < 2:
        return 0.0
    pos = yv == 1.0
    n_pos = int(pos.sum())
    if n_pos == 0 or n_pos == xv.size:
        return 0.0
    s_x = float(xv.std())
    if s_x == 0.0:
        return 0.0
    p = n_pos / xv.size
    r = (float(xv[pos].mean()) - float(xv[~pos].mean())) / s_x * math.sqrt(p * (1.0 - p))
    return max(-1.0, min(1.0, r))


def _binary_macro_f1(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    f1s = []
    for cls in (0, 1):
        tp = int(np.sum((y_true == cls) & (y_pred == cls)))
        fp = int(np.sum((y_true != cls) & (y_pred == cls)))
        fn = int(np.sum((y_true == cls) & (y_pred != cls)))
        denom = 2 * tp + fp + fn
        f1s.append(2 * tp / denom if denom else 0.0)
    return float(np.mean(f1s))


# ---------------------------------------------------------------------------
# decision trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Condition:
    feature: str
    op: str  # "ge" | "lt"
    threshold: float

    def holds(self, value: float) -> bool:
        return value >= self.threshold if self.op == "ge" else value < self.threshold


@dataclass
class Leaf:
    prob: float  # positive-class probability


@dataclass
class Split:
    feature: str
    threshold: float  # value < threshold goes left, >= goes right
    left: Union["Split", Leaf]
    right: Union["Split", Leaf]


@dataclass
class DecisionTree:
    root: Union[Split, Leaf]
    trained_features: tuple[str, ...]
    max_depth: int = 0
    cv_macro_f1: Optional[float] = None

    @property
    def is_constant(self) -> bool:
        return isinstance(self.root, Leaf)

    def predict_prob(self, mf: MetaFeatureVector) -> float:
        node = self.root
        while isinstance(node, Split):
            node = node.right if mf[node.feature] >= node.threshold else node.left
        return node.prob

    def decision_path(self, mf: MetaFeatureVector) -> list[Condition]:
        if self.is_constant:
            raise EmptyPath("constant predictor has no decision path")
        path = []
        node = self.root
        while isinstance(node, Split):
            if mf[node.feature] >= node.threshold:
                path.append(Condition(node.feature, "ge", node.threshold))
                node = node.right
            else:
                path.append(Condition(node.feature, "lt", node.threshold))
                node = node.left
        return path

    def to_json_obj(self) -> dict:
        def encode(node):
            if isinstance(node, Leaf):
                return {"prob": node.prob}
            return {"feature": node.feature, "threshold": node.threshold,
                    "left": encode(node.left), "right": encode(node.right)}
        return {
            "trained_features": list(self.trained_features),
            "max_depth": self.max_depth,
            "cv_macro_f1": self.cv_macro_f1,
            "root": encode(self.root),
        }

    @classmethod
    def from_json_obj(cls, raw: dict) -> "DecisionTree":
        def decode(node):
            if "prob" in node:
                return Leaf(prob=float(node["prob"]))
            return Split(feature=node["feature"], threshold=float(node["threshold"]),
                         left=decode(node["left"]), right=decode(node["right"]))
        return cls(
            root=decode(raw["root"]),
            trained_features=tuple(raw["trained_features"]),
            max_depth=int(raw["max_depth"]),
            cv_macro_f1=raw.get("cv_macro_f1"),
        )


def _balanced_weights(y: np.ndarray) -> tuple[float, float]:
    """w_c = N / (2 * N_c); callers guarantee both classes are present."""
    n = y.size
    n_pos = int(y.sum())
    return n / (2.0 * n_pos), n / (2.0 * (n - n_pos))


def _node_gini(n_pos: int, n_neg: int, w_pos: float, w_neg: float) -> float:
    w = n_pos * w_pos + n_neg * w_neg
    if w == 0.0:
        return 0.0
    return 1.0 - (n_pos * w_pos / w) ** 2 - (n_neg * w_neg / w) ** 2


def _best_split(X: np.ndarray, y: np.ndarray, w_pos: float, w_neg: float):
    """Best (feature index, threshold) by weighted Gini decrease.
    Thresholds are midpoints of consecutive distinct values; ties prefer
    the lower feature index, then the lower threshold."""
    n = y.size
    n_pos = int(y.sum())
    n_neg = n - n_pos
    parent = _node_gini(n_pos, n_neg, w_pos, w_neg)
    w_total = n_pos * w_pos + n_neg * w_neg
    best = None  # (gain, feature, threshold)
    for fi in range(X.shape[1]):
        order = np.argsort(X[:, fi], kind="stable")
        sv = X[order, fi]
        sy = y[order]
        cut = np.nonzero(sv[:-1] != sv[1:])[0]  # split after these positions
        if cut.size == 0:
            continue
        left_n = cut + 1
        left_pos = np.cumsum(sy)[cut]
        left_neg = left_n - left_pos
        right_pos = n_pos - left_pos
        right_neg = n_neg - left_neg
        wl = left_pos * w_pos + left_neg * w_neg
        wr = right_pos * w_pos + right_neg * w_neg
        gini_l = 1.0 - (left_pos * w_pos / wl) ** 2 - (left_neg * w_neg / wl) ** 2
        gini_r = 1.0 - (right_pos * w_pos / wr) ** 2 - (right_neg * w_neg / wr) ** 2
        gains = parent - (wl * gini_l + wr * gini_r) / w_total
        k = int(np.argmax(gains))  # first max = lowest threshold
        if best is None or gains[k] > best[0] + _GAIN_TOL:
            threshold = float((sv[cut[k]] + sv[cut[k] + 1]) / 2.0)
            best = (float(gains[k]), fi, threshold)
    return best


def _grow(X: np.ndarray, y: np.ndarray, depth_left: int,
          w_pos: float, w_neg: float, feature_names: Sequence[str]) -> Union[Split, Leaf]:
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    w = n_pos * w_pos + n_neg * w_neg
    prob = (n_pos * w_pos / w) if w else 0.0
    if depth_left == 0 or n_pos == 0 or n_neg == 0:
        return Leaf(prob=prob)
    best = _best_split(X, y, w_pos, w_neg)
    if best is None or best[0] <= _GAIN_TOL:
        return Leaf(prob=prob)
    _, fi, threshold = best
    mask = X[:, fi] < threshold
    return Split(
        feature=feature_names[fi],
        threshold=threshold,
        left=_grow(X[mask], y[mask], depth_left - 1, w_pos, w_neg, feature_names),
        right=_grow(X[~mask], y[~mask], depth_left - 1, w_pos, w_neg, feature_names),
    )


def _fit_cart(X: np.ndarray, y: np.ndarray, feature_names: Sequence[str],
              max_depth: int) -> Union[Split, Leaf]:
    if y.sum() == 0 or y.sum() == y.size:
        return Leaf(prob=float(y.mean()))
    w_pos, w_neg = _balanced_weights(y)
    return _grow(X, y, max_depth, w_pos, w_neg, feature_names)


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 0
    pb_threshold: float = 0.1
    depth_grid: tuple[int, ...] = (2, 3, 4, 5)
    cv_folds: int = 5
    ranker_l2: float = 1e-2
    ranker_iters: int = 500
    ranker_step: float = 0.1
    fe_cutoff: float = 0.5

    def to_dict(self) -> dict:
        d = asdict(self)
        d["depth_grid"] = list(self.depth_grid)
        return d


def _record_sort_key(record) -> str:
    return json.dumps(record.to_record(), sort_keys=True)


def _feature_matrix(records, feature_names: Sequence[str]) -> np.ndarray:
    return np.asarray(
        [[r.meta_features[f] for f in feature_names] for r in records], dtype=float
    )


def select_features(corpus: MetaCorpus, fe: str, threshold: float = 0.1) -> list[str]:
    """Meta-features whose |point-biserial correlation| with the FE label's
    presence reaches the threshold, in canonical feature order. Falls back
    to the top 3 |r| when nothing passes."""
    records = corpus.records
    y = np.asarray([1.0 if fe in r.fe_sequence else 0.0 for r in records])
    if y.size == 0 or y.min() == y.max():
        raise OneClassOnly(f"{fe}: label present in all or none of the records")
    X = _feature_matrix(records, META_FEATURES)
    rs = [point_biserial(X[:, i], y) for i in range(len(META_FEATURES))]
    # degenerate features report r = 0.0 exactly and are never selected
    selected = [f for f, r in zip(META_FEATURES, rs) if r != 0.0 and abs(r) >= threshold]
    if not selected:
        by_strength = sorted(range(len(rs)), key=lambda i: (-abs(rs[i]), i))[:3]
        selected = [META_FEATURES[i] for i in sorted(by_strength)]
    return selected


def train_fe_tree(corpus: MetaCorpus, fe: str, cfg: TrainConfig = TrainConfig()) -> DecisionTree:
    """CART with Gini impurity and balanced class weights on the selected
    features; max depth picked from the grid by 5-fold CV macro-F1 (ties
    to the smaller depth). A one-class label yields a constant predictor
    at the class prior."""
    try:
        features = select_features(corpus, fe, cfg.pb_threshold)
    except OneClassOnly:
        prior = float(np.mean([1.0 if fe in r.fe_sequence else 0.0 for r in corpus.records]))
        log.warning("%s: one class only, using constant predictor at prior %.3f", fe, prior)
        return DecisionTree(root=Leaf(prob=prior), trained_features=())

    records = sorted(corpus.records, key=_record_sort_key)
    rng = random.Random(cfg.seed)
    rng.shuffle(records)
    X = _feature_matrix(records, features)
    y = np.asarray([1.0 if fe in r.fe_sequence else 0.0 for r in records])

    folds = [np.arange(len(records)) % cfg.cv_folds == k for k in range(cfg.cv_folds)]
    best_depth, best_score = None, -1.0
    for depth in cfg.depth_grid:
        scores = []
        for mask in folds:
            if y[~mask].size == 0 or mask.sum() == 0:
                continue
            root = _fit_cart(X[~mask], y[~mask], features, depth)
            probe = DecisionTree(root=root, trained_features=tuple(features))
            preds = np.asarray([
                1.0 if probe.predict_prob(dict(zip(features, row))) >= 0.5 else 0.0
                for row in X[mask]
            ])
            scores.append(_binary_macro_f1(y[mask], preds))
        mean_score = float(np.mean(scores)) if scores else 0.0
        if mean_score > best_score + _GAIN_TOL:
            best_depth, best_score = depth, mean_score

    root = _fit_cart(X, y, features, best_depth)
    return DecisionTree(root=root, trained_features=tuple(features),
                        max_depth=best_depth, cv_macro_f1=best_score)


# ---------------------------------------------------------------------------
# model ranker: one-vs-rest logistic regression + linear SVM, averaged
# ---------------------------------------------------------------------------

def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _fit_logistic(X: np.ndarray, s: np.ndarray, sw: np.ndarray,
                  l2: float, iters: int, step: float) -> tuple[np.ndarray, float]:
    """Full-batch gradient descent on weighted L2-regularized log-loss.
    s is the +/-1 label vector, sw the per-sample class weights."""
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    for _ in range(iters):
        z = X @ w + b
        dz = -sw * s * _sigmoid(-s * z) / n
        w -= step * (X.T @ dz + l2 * w)
        b -= step * float(dz.sum())
    return w, b


def _fit_svm(X: np.ndarray, s: np.ndarray, sw: np.ndarray,
             l2: float, iters: int, step: float) -> tuple[np.ndarray, float]:
    """Subgradient descent on weighted hinge loss with L2 regularization."""
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    for _ in range(iters):
        margin = s * (X @ w + b)
        active = margin < 1.0
        coef = np.where(active, -sw * s, 0.0) / n
        w -= step * (X.T @ coef + l2 * w)
        b -= step * float(coef.sum())
    return w, b


def _fit_platt(deci: np.ndarray, s: np.ndarray, max_iter: int = 100) -> tuple[float, float]:
    """Fit the sigmoid p = 1 / (1 + exp(a * f + b)) to decision values by
    Newton iterations with backtracking line search."""
    prior1 = int(np.sum(s > 0))
    prior0 = s.size - prior1
    hi = (prior1 + 1.0) / (prior1 + 2.0)
    lo = 1.0 / (prior0 + 2.0)
    t = np.where(s > 0, hi, lo)

    min_step, sigma, eps = 1e-10, 1e-12, 1e-5

    def objective(a: float, b: float) -> float:
        f_ab = deci * a + b
        # stable log(1 + exp(x)) split by sign; np.where evaluates both
        # branches, so silence the overflow of the unselected lane
        with np.errstate(over="ignore"):
            return float(np.sum(np.where(
                f_ab >= 0, t * f_ab + np.log1p(np.exp(-f_ab)),
                (t - 1.0) * f_ab + np.log1p(np.exp(f_ab)))))

    a, b = 0.0, math.log((prior0 + 1.0) / (prior1 + 1.0))
    fval = objective(a, b)
    for _ in range(max_iter):
        f_ab = deci * a + b
        with np.errstate(over="ignore"):
            p = np.where(f_ab >= 0, np.exp(-f_ab) / (1.0 + np.exp(-f_ab)),
                         1.0 / (1.0 + np.exp(f_ab)))
        q = 1.0 - p
        d2 = p * q
        h11 = float(np.sum(deci * deci * d2)) + sigma
        h22 = float(np.sum(d2)) + sigma
        h21 = float(np.sum(deci * d2))
        d1 = t - p
        g1 = float(np.sum(deci * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < eps and abs(g2) < eps:
            break
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * da + g2 * db
        stepsize = 1.0
        while stepsize >= min_step:
            new_a, new_b = a + stepsize * da, b + stepsize * db
            new_f = objective(new_a, new_b)
            if new_f < fval + 1e-4 * stepsize * gd:
                a, b, fval = new_a, new_b, new_f
                break
            stepsize /= 2.0
        else:
            break
    return a, b


@dataclass
class ModelRanker:
    task: TaskKind
    model_names: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray
    learners: dict[str, dict]  # name -> lr_w, lr_b, svm_w, svm_b, platt_a, platt_b

    def _standardize(self, mf: MetaFeatureVector) -> np.ndarray:
        x = np.asarray([mf[f] for f in META_FEATURES], dtype=float)
        return (x - self.mean) / self.std

    def score(self, model: str, mf: MetaFeatureVector) -> float:
        x = self._standardize(mf)
        p = self.learners[model]
        p_lr = float(_sigmoid(np.asarray(np.dot(p["lr_w"], x) + p["lr_b"])))
        f = float(np.dot(p["svm_w"], x) + p["svm_b"])
        p_svm = float(_sigmoid(np.asarray(-(p["platt_a"] * f + p["platt_b"]))))
        return (p_lr + p_svm) / 2.0

    def rank(self, mf: MetaFeatureVector) -> list[tuple[str, float]]:
        scored = [(name, self.score(name, mf)) for name in self.model_names]
        return sorted(scored, key=lambda item: (-item[1], item[0]))

    def to_json_obj(self) -> dict:
        return {
            "task": self.task.value,
            "model_names": list(self.model_names),
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "learners": {
                name: {
                    "lr_w": p["lr_w"].tolist(), "lr_b": p["lr_b"],
                    "svm_w": p["svm_w"].tolist(), "svm_b": p["svm_b"],
                    "platt_a": p["platt_a"], "platt_b": p["platt_b"],
                }
                for name, p in sorted(self.learners.items())
            },
        }

    @classmethod
    def from_json_obj(cls, raw: dict) -> "ModelRanker":
        return cls(
            task=TaskKind(raw["task"]),
            model_names=tuple(raw["model_names"]),
            mean=np.asarray(raw["mean"]),
            std=np.asarray(raw["std"]),
            learners={
                name: {
                    "lr_w": np.asarray(p["lr_w"]), "lr_b": float(p["lr_b"]),
                    "svm_w": np.asarray(p["svm_w"]), "svm_b": float(p["svm_b"]),
                    "platt_a": float(p["platt_a"]), "platt_b": float(p["platt_b"]),
                }
                for name, p in raw["learners"].items()
            },
        )


def train_model_ranker(corpus: MetaCorpus, task: TaskKind,
                       cfg: TrainConfig = TrainConfig()) -> ModelRanker:
    """One-vs-rest over all 38 standardized meta-features: logistic
    regression and a Platt-calibrated linear SVM, averaged at query time."""
    records = sorted(corpus.records_for(task), key=_record_sort_key)
    names = corpus.model_meta_targets(task)
    if len(names) < 2:
        raise InsufficientModels(
            f"need >= 2 model labels with >= 5 occurrences for task {task.value}, got {len(names)}"
        )
    X = _feature_matrix(records, META_FEATURES)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0.0] = 1.0
    Xs = (X - mean) / std

    learners = {}
    for name in names:
        s = np.asarray([1.0 if r.model == name else -1.0 for r in records])
        n_pos = int(np.sum(s > 0))
        n_neg = s.size - n_pos
        w_pos = s.size / (2.0 * n_pos) if n_pos else 0.0
        w_neg = s.size / (2.0 * n_neg) if n_neg else 0.0
        sw = np.where(s > 0, w_pos, w_neg)
        lr_w, lr_b = _fit_logistic(Xs, s, sw, cfg.ranker_l2, cfg.ranker_iters, cfg.ranker_step)
        svm_w, svm_b = _fit_svm(Xs, s, sw, cfg.ranker_l2, cfg.ranker_iters, cfg.ranker_step)
        platt_a, platt_b = _fit_platt(Xs @ svm_w + svm_b, s)
        learners[name] = {
            "lr_w": lr_w, "lr_b": lr_b,
            "svm_w": svm_w, "svm_b": svm_b,
            "platt_a": platt_a, "platt_b": platt_b,
        }
    return ModelRanker(task=task, model_names=names, mean=mean, std=std, learners=learners)


# ---------------------------------------------------------------------------
# bundle, prediction, and relevant-column inference
# ---------------------------------------------------------------------------

@dataclass
class SkeletonPredictorBundle:
    fe_trees: dict[str, DecisionTree]
    rankers: dict[str, Optional[ModelRanker]]  # keyed "C" / "R"
    taxonomy_version: str
    config: dict
    corpus_hash: str

    def save(self, path: str) -> None:
        payload = {
            "format": "pipesynth-bundle-v1",
            "taxonomy_version": self.taxonomy_version,
            "config": self.config,
            "corpus_hash": self.corpus_hash,
            "fe_trees": {name: t.to_json_obj() for name, t in sorted(self.fe_trees.items())},
            "rankers": {
                code: (r.to_json_obj() if r is not None else None)
                for code, r in sorted(self.rankers.items())
            },
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "SkeletonPredictorBundle":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls(
            fe_trees={n: DecisionTree.from_json_obj(t) for n, t in raw["fe_trees"].items()},
            rankers={
                code: (ModelRanker.from_json_obj(r) if r is not None else None)
                for code, r in raw["rankers"].items()
            },
            taxonomy_version=raw["taxonomy_version"],
            config=raw["config"],
            corpus_hash=raw["corpus_hash"],
        )


def corpus_hash(corpus: MetaCorpus) -> str:
    payload = "\n".join(json.dumps(r.to_record(), sort_keys=True) for r in corpus.records)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def train_bundle(corpus: MetaCorpus, cfg: TrainConfig = TrainConfig()) -> tuple[SkeletonPredictorBundle, dict]:
    """Train one tree per in-corpus FE label and a ranker per task.
    Returns (bundle, training report)."""
    fe_targets = corpus.fe_meta_targets()
    if not fe_targets:
        # degenerate corpora (< 5 records) still yield a usable bundle:
        # every present label becomes a constant predictor
        fe_targets = tuple(l for l in corpus.taxonomy.fe_labels
                           if corpus.label_counts().get(l, 0) > 0)
        if fe_targets:
            log.warning("no FE label reaches %d occurrences; training constants for %s",
                        5, ", ".join(fe_targets))
    report: dict = {"fe": {}, "models": {}}
    trees = {}
    for fe in fe_targets:
        tree = train_fe_tree(corpus, fe, cfg)
        trees[fe] = tree
        report["fe"][fe] = {
            "selected_features": list(tree.trained_features),
            "cv_macro_f1": tree.cv_macro_f1,
            "max_depth": tree.max_depth,
            "constant": tree.is_constant,
        }
    rankers: dict[str, Optional[ModelRanker]] = {}
    for code, task in (("C", TaskKind.CLASSIFICATION), ("R", TaskKind.REGRESSION)):
        try:
            ranker = train_model_ranker(corpus, task, cfg)
        except InsufficientModels as exc:
            log.warning("%s", exc)
            ranker = None
        rankers[code] = ranker
        report["models"][code] = list(ranker.model_names) if ranker else []
    bundle = SkeletonPredictorBundle(
        fe_trees=trees,
        rankers=rankers,
        taxonomy_version=corpus.taxonomy.version,
        config=cfg.to_dict(),
        corpus_hash=corpus_hash(corpus),
    )
    return bundle, report


def predict_fe(bundle: SkeletonPredictorBundle, mf: MetaFeatureVector,
               cutoff: float = 0.5) -> list[tuple[str, float]]:
    """FE labels whose tree probability reaches the cutoff, sorted by
    descending probability (ties lexicographic)."""
    out = []
    for label in sorted(bundle.fe_trees):
        prob = bundle.fe_trees[label].predict_prob(mf)
        if prob >= cutoff:
            out.append((label, prob))
    return sorted(out, key=lambda item: (-item[1], item[0]))


def extract_decision_path(tree: DecisionTree, mf: MetaFeatureVector) -> list[Condition]:
    return tree.decision_path(mf)


def infer_relevant_columns(path: Sequence[Condition], dataset: Dataset,
                           fe_label: str, taxonomy: Optional[Taxonomy] = None) -> list[str]:
    """Columns satisfying at least one decision-path condition under the
    per-column meta-feature analogues. Target columns are never selected;
    an empty result falls back to the FE label's applicable kinds."""
    taxonomy = taxonomy or load_taxonomy()
    selected = []
    for col in dataset.feature_columns:
        for cond in path:
            value = column_feature_value(col, cond.feature)
            if value is not None and cond.holds(value):
                selected.append(col.name)
                break
    if selected:
        return selected

    fallback = taxonomy.fe_fallback[fe_label]
    if fallback == "missing":
        return [c.name for c in dataset.feature_columns if c.has_missing()]
    if fallback == "all":
        return [c.name for c in dataset.feature_columns]
    kinds = {ColumnKind(k) for k in fallback}
    return [c.name for c in dataset.feature_columns if c.kind in kinds]


@dataclass(frozen=True)
class FeChoice:
    label: str
    prob: float
    columns: tuple[str, ...]


@dataclass(frozen=True)
class Skeleton:
    fe: tuple[FeChoice, ...]
    model: str
    model_rank: int
    model_score: float

    def to_json_obj(self) -> dict:
        return {
            "fe": [{"label": c.label, "prob": c.prob, "columns": list(c.columns)} for c in self.fe],
            "model": self.model,
            "model_rank": self.model_rank,
            "model_score": self.model_score,
        }

    @classmethod
    def from_json_obj(cls, raw: dict) -> "Skeleton":
        return cls(
            fe=tuple(FeChoice(c["label"], float(c["prob"]), tuple(c["columns"]))
                     for c in raw["fe"]),
            model=raw["model"],
            model_rank=int(raw["model_rank"]),
            model_score=float(raw.get("model_score", 0.0)),
        )


def rank_models(bundle: SkeletonPredictorBundle, mf: MetaFeatureVector,
                task: TaskKind) -> list[tuple[str, float]]:
    code = "C" if task == TaskKind.CLASSIFICATION else "R"
    ranker = bundle.rankers.get(code)
    if ranker is None:
        raise InsufficientModels(f"bundle has no model ranker for task {task.value}")
    return ranker.rank(mf)


def generate_skeletons(fe_choices: Sequence[FeChoice],
                       ranked: Sequence[tuple[str, float]], k: int) -> list[Skeleton]:
    """Top-k skeletons sharing the FE tuple, differing only in the model."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(ranked):
        log.warning("only %d models available, truncating k=%d", len(ranked), k)
        k = len(ranked)
    return [
        Skeleton(fe=tuple(fe_choices), model=name, model_rank=i + 1, model_score=score)
        for i, (name, score) in enumerate(ranked[:k])
    ]


def seed_skeletons(bundle: SkeletonPredictorBundle, dataset: Dataset,
                   mf: MetaFeatureVector, k: int = 3, cutoff: float = 0.5,
                   taxonomy: Optional[Taxonomy] = None) -> list[Skeleton]:
    """The full seeding stage: FE prediction, relevant-column inference,
    model ranking. FE components whose column set comes out empty (for
    example an imputer on a dataset with no missing values) are dropped."""
    taxonomy = taxonomy or load_taxonomy()
    choices = []
    for label, prob in predict_fe(bundle, mf, cutoff):
        tree = bundle.fe_trees[label]
        try:
            path = tree.decision_path(mf)
        except EmptyPath:
            path = []
        columns = infer_relevant_columns(path, dataset, label, taxonomy)
        if not columns:
            log.info("dropping %s: no applicable columns", label)
            continue
        choices.append(FeChoice(label=label, prob=prob, columns=tuple(columns)))
    ranked = rank_models(bundle, mf, dataset.task)
    return generate_skeletons(choices, ranked, k)
