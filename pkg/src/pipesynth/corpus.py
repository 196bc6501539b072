"""Meta-learning corpus: abstract pipeline records, the component label
taxonomy, the mined component-order DAG, and the hyperparameter catalog.

The corpus is a JSON-Lines file, one record per line:

    {"dataset_id": ..., "task": "C"|"R", "meta_features": {38 keys},
     "fe_sequence": ["Imputer", ...], "model": "CatBoost"}

Raw API names in fe_sequence/model are accepted and canonicalized through
the taxonomy alias map.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .errors import ApplicabilityMismatch, SchemaError, UnknownLabel
from .metafeatures import META_FEATURES, MetaFeatureVector, validate_meta_vector
from .tabular import TaskKind

log = logging.getLogger(__name__)

MODEL_NODE = "MODEL"
MIN_TARGET_OCCURRENCES = 5

_TASK_CODES = {"C": TaskKind.CLASSIFICATION, "R": TaskKind.REGRESSION}
_CODE_OF_TASK = {v: k for k, v in _TASK_CODES.items()}


def _asset_text(name: str) -> str:
    return (resources.files("pipesynth") / "assets" / name).read_text(encoding="utf-8")


@dataclass(frozen=True)
class Taxonomy:
    """Canonical component labels, their aliases, per-model task
    applicability, and per-FE pipeline placement."""

    version: str
    fe_labels: tuple[str, ...]
    model_labels: tuple[str, ...]
    alias_map: dict[str, str]
    model_tasks: dict[str, frozenset[str]]  # label -> subset of {"C", "R"}
    fe_stage: dict[str, str]                # label -> pre_detach | post_detach
    fe_priority: dict[str, int]             # canonical emission order
    fe_fallback: dict[str, object]          # "missing" | "all" | [kind names]

    def is_fe(self, name: str) -> bool:
        return name in self.fe_labels

    def is_model(self, name: str) -> bool:
        return name in self.model_labels

    def model_supports(self, model: str, task: TaskKind) -> bool:
        return _CODE_OF_TASK[task] in self.model_tasks[model]


def load_taxonomy() -> Taxonomy:
    raw = json.loads(_asset_text("taxonomy.json"))
    fe = tuple(entry["name"] for entry in raw["fe"])
    models = tuple(entry["name"] for entry in raw["models"])
    return Taxonomy(
        version=raw["version"],
        fe_labels=fe,
        model_labels=models,
        alias_map=dict(raw["aliases"]),
        model_tasks={e["name"]: frozenset(e["tasks"]) for e in raw["models"]},
        fe_stage={e["name"]: e["stage"] for e in raw["fe"]},
        fe_priority={e["name"]: e["priority"] for e in raw["fe"]},
        fe_fallback={e["name"]: e["fallback"] for e in raw["fe"]},
    )


def canonicalize_label(api_name: str, taxonomy: Taxonomy) -> tuple[str, str]:
    """Map a raw API name to ("FE"|"MODEL", canonical label)."""
    name = taxonomy.alias_map.get(api_name, api_name)
    if taxonomy.is_fe(name):
        return "FE", name
    if taxonomy.is_model(name):
        return "MODEL", name
    raise UnknownLabel(api_name)


@dataclass(frozen=True)
class AbstractPipeline:
    dataset_id: str
    task: TaskKind
    meta_features: MetaFeatureVector
    fe_sequence: tuple[str, ...]
    model: str

    def to_record(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "task": _CODE_OF_TASK[self.task],
            "meta_features": dict(self.meta_features),
            "fe_sequence": list(self.fe_sequence),
            "model": self.model,
        }


@dataclass(frozen=True)
class MetaCorpus:
    records: tuple[AbstractPipeline, ...]
    taxonomy: Taxonomy

    def label_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for r in self.records:
            for fe in r.fe_sequence:
                counts[fe] = counts.get(fe, 0) + 1
            counts[r.model] = counts.get(r.model, 0) + 1
        return counts

    def fe_meta_targets(self) -> tuple[str, ...]:
        """FE labels frequent enough (>= 5 occurrences) to learn from."""
        counts = self.label_counts()
        return tuple(
            l for l in self.taxonomy.fe_labels if counts.get(l, 0) >= MIN_TARGET_OCCURRENCES
        )

    def model_meta_targets(self, task: TaskKind) -> tuple[str, ...]:
        counts: dict[str, int] = {}
        for r in self.records_for(task):
            counts[r.model] = counts.get(r.model, 0) + 1
        return tuple(
            l for l in self.taxonomy.model_labels
            if counts.get(l, 0) >= MIN_TARGET_OCCURRENCES and self.taxonomy.model_supports(l, task)
        )

    def records_for(self, task: TaskKind) -> tuple[AbstractPipeline, ...]:
        return tuple(r for r in self.records if r.task == task)


def _parse_record(raw: dict, line_no: int, taxonomy: Taxonomy) -> AbstractPipeline:
    for key in ("dataset_id", "task", "meta_features", "fe_sequence", "model"):
        if key not in raw:
            raise SchemaError(f"missing key {key!r}", line_no)
    if raw["task"] not in _TASK_CODES:
        raise SchemaError(f"task must be 'C' or 'R', got {raw['task']!r}", line_no)
    task = _TASK_CODES[raw["task"]]

    mf = {name: float(raw["meta_features"][name])
          for name in META_FEATURES if name in raw["meta_features"]}
    try:
        validate_meta_vector(mf)
    except ValueError as exc:
        raise SchemaError(f"bad meta_features: {exc}", line_no) from None

    fe_sequence = []
    for api_name in raw["fe_sequence"]:
        kind, label = canonicalize_label(str(api_name), taxonomy)
        if kind != "FE":
            raise SchemaError(f"{api_name!r} is a model label inside fe_sequence", line_no)
        if label in fe_sequence:
            raise SchemaError(f"duplicate FE label {label!r} after canonicalization", line_no)
        fe_sequence.append(label)

    kind, model = canonicalize_label(str(raw["model"]), taxonomy)
    if kind != "MODEL":
        raise SchemaError(f"{raw['model']!r} is not a model label", line_no)
    if not taxonomy.model_supports(model, task):
        raise ApplicabilityMismatch(
            f"line {line_no}: model {model!r} does not support task {raw['task']!r}"
        )
    return AbstractPipeline(
        dataset_id=str(raw["dataset_id"]),
        task=task,
        meta_features=mf,
        fe_sequence=tuple(fe_sequence),
        model=model,
    )


def parse_corpus(path: str, taxonomy: Optional[Taxonomy] = None) -> MetaCorpus:
    """Load and validate a JSON-Lines corpus file."""
    taxonomy = taxonomy or load_taxonomy()
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc}", line_no) from None
            records.append(_parse_record(raw, line_no, taxonomy))
    corpus = MetaCorpus(records=tuple(records), taxonomy=taxonomy)
    if not records:
        log.warning("corpus %s is empty", path)
    else:
        counts = corpus.label_counts()
        rare = sorted(l for l, c in counts.items() if c < MIN_TARGET_OCCURRENCES)
        if rare:
            log.warning("labels below %d occurrences excluded from meta-targets: %s",
                        MIN_TARGET_OCCURRENCES, ", ".join(rare))
    return corpus


def serialize_corpus(corpus: MetaCorpus, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in corpus.records:
            fh.write(json.dumps(r.to_record()) + "\n")


# ---------------------------------------------------------------------------
# component-order DAG
# ---------------------------------------------------------------------------

@dataclass
class OrderDag:
    """Directed acyclic graph of relative component ordering. Nodes are FE
    labels plus the MODEL sink; edge weights are corpus support counts."""

    nodes: tuple[str, ...]
    edges: dict[tuple[str, str], int]
    node_support: dict[str, int] = field(default_factory=dict)

    def successors(self, node: str) -> list[str]:
        return sorted(b for (a, b) in self.edges if a == node)

    def predecessors(self, node: str) -> list[str]:
        return sorted(a for (a, b) in self.edges if b == node)

    def reachable_from(self, start: str, skip_edge: Optional[tuple[str, str]] = None) -> set[str]:
        seen: set[str] = set()
        stack = [start]
        while stack:
            u = stack.pop()
            for (a, b), _ in self.edges.items():
                if a == u and (a, b) != skip_edge and b not in seen:
                    seen.add(b)
                    stack.append(b)
        return seen

    def find_cycle(self) -> Optional[list[tuple[str, str]]]:
        """Return the edges of some cycle, or None. Deterministic: DFS in
        sorted node/successor order."""
        color: dict[str, int] = {}
        parent_edge: dict[str, tuple[str, str]] = {}

        def dfs(u: str) -> Optional[list[tuple[str, str]]]:
            color[u] = 1
            for v in self.successors(u):
                if color.get(v, 0) == 1:
                    cycle = [(u, v)]
                    node = u
                    while node != v:
                        edge = parent_edge[node]
                        cycle.append(edge)
                        node = edge[0]
                    return cycle
                if color.get(v, 0) == 0:
                    parent_edge[v] = (u, v)
                    found = dfs(v)
                    if found:
                        return found
            color[u] = 2
            return None

        for node in sorted(self.nodes):
            if color.get(node, 0) == 0:
                found = dfs(node)
                if found:
                    return found
        return None

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None

    def break_cycles(self) -> None:
        """Drop the lowest-support edge (ties: lexicographic) of each cycle
        until the graph is acyclic."""
        while True:
            cycle = self.find_cycle()
            if cycle is None:
                return
            victim = min(cycle, key=lambda e: (self.edges[e], e))
            log.warning("order mining: breaking cycle by dropping edge %s -> %s", *victim)
            del self.edges[victim]

    def transitively_reduce(self) -> None:
        """Remove every edge implied by a longer path. Unique for a DAG;
        redundancy is judged against the pre-reduction graph."""
        original = set(self.edges)
        closure = {n: self.reachable_from(n) for n in self.nodes}
        for (a, b) in sorted(original):
            via = any(
                c != b and (a, c) in original and b in closure[c]
                for c in self.nodes
            )
            if via:
                del self.edges[(a, b)]

    def levels(self) -> dict[str, int]:
        """Longest-path depth from the sources; requires acyclicity."""
        order = self.topological_nodes()
        level = {n: 0 for n in self.nodes}
        for n in order:
            for p in self.predecessors(n):
                level[n] = max(level[n], level[p] + 1)
        return level

    def topological_nodes(self) -> list[str]:
        """Kahn's algorithm with lexicographic tie-break (used for graph
        bookkeeping; pipeline emission uses the richer order in the
        instantiation stage)."""
        indegree = {n: 0 for n in self.nodes}
        for (_, b) in self.edges:
            indegree[b] += 1
        ready = sorted(n for n, d in indegree.items() if d == 0)
        out = []
        while ready:
            n = ready.pop(0)
            out.append(n)
            for s in self.successors(n):
                indegree[s] -= 1
                if indegree[s] == 0:
                    ready.append(s)
            ready.sort()
        if len(out) != len(self.nodes):
            return []
        return out

    def to_json(self) -> str:
        return json.dumps({
            "nodes": list(self.nodes),
            "node_support": dict(sorted(self.node_support.items())),
            "edges": [
                {"from": a, "to": b, "support": s}
                for (a, b), s in sorted(self.edges.items())
            ],
        }, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "OrderDag":
        raw = json.loads(text)
        return cls(
            nodes=tuple(raw["nodes"]),
            edges={(e["from"], e["to"]): int(e["support"]) for e in raw["edges"]},
            node_support={k: int(v) for k, v in raw.get("node_support", {}).items()},
        )


def load_default_order_dag() -> OrderDag:
    return OrderDag.from_json(_asset_text("order_dag.json"))


def mine_order_dag(corpus: MetaCorpus, min_support: float = 0.8) -> OrderDag:
    """Mine the relative order of FE components from the corpus.

    For each unordered pair that co-occurs in at least one record, an edge
    is added in the majority direction when that direction holds in at
    least min_support of the co-occurrences. Every FE points at the MODEL
    sink. The result is cycle-broken and transitively reduced.
    """
    pair_counts: dict[tuple[str, str], int] = {}
    node_support: dict[str, int] = {}
    for r in corpus.records:
        seq = r.fe_sequence
        for fe in seq:
            node_support[fe] = node_support.get(fe, 0) + 1
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                key = (seq[i], seq[j])
                pair_counts[key] = pair_counts.get(key, 0) + 1
    node_support[MODEL_NODE] = len(corpus.records)

    edges: dict[tuple[str, str], int] = {}
    seen_pairs = {tuple(sorted(k)) for k in pair_counts}
    for a, b in sorted(seen_pairs):
        ab = pair_counts.get((a, b), 0)
        ba = pair_counts.get((b, a), 0)
        total = ab + ba
        if ab >= ba and ab >= min_support * total:
            edges[(a, b)] = ab
        elif ba > ab and ba >= min_support * total:
            edges[(b, a)] = ba
    for fe in node_support:
        if fe != MODEL_NODE:
            edges[(fe, MODEL_NODE)] = node_support[fe]

    dag = OrderDag(
        nodes=tuple(sorted(node_support)),
        edges=edges,
        node_support=node_support,
    )
    dag.break_cycles()
    dag.transitively_reduce()
    return dag


# ---------------------------------------------------------------------------
# hyperparameter catalog
# ---------------------------------------------------------------------------

def load_hyperparam_catalog(path: Optional[str] = None,
                            taxonomy: Optional[Taxonomy] = None) -> dict[str, list[dict]]:
    """Model label -> ordered list of hyperparameter sets. Models missing
    from the file fall back to a single empty set."""
    taxonomy = taxonomy or load_taxonomy()
    if path is None:
        raw = json.loads(_asset_text("hyperparams.json"))
    else:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    catalog = {}
    for model in taxonomy.model_labels:
        sets = raw.get("models", {}).get(model) or [{}]
        catalog[model] = [dict(s) for s in sets]
    return catalog


# ---------------------------------------------------------------------------
# synthetic corpus with planted rules
# ---------------------------------------------------------------------------

# inclusion probability of each FE label given that its trigger holds / fails
PLANTED_FE_RATES = {
    "Imputer": (0.97, 0.02),
    "OrdinalEncoder": (0.82, 0.04),
    "OneHotEncoder": (0.70, 0.04),
    "TextPreprocessor": (0.85, 0.02),
    "TextVectorizer": (0.95, 0.02),
    "DateFeaturization": (0.85, 0.02),
    "LinearScaler": (0.55, 0.10),
    "LogScaler": (0.70, 0.04),
    "DataBalancer": (0.90, 0.03),
}

LOG_SCALER_SKEW_MIN = 0.3
LARGE_DATASET_ROWS = 10_000


def planted_fe_trigger(label: str, task: TaskKind, mf: MetaFeatureVector) -> bool:
    """The dataset property that makes the generator include an FE label."""
    if label == "Imputer":
        return mf["has_missing"] >= 0.5
    if label in ("OrdinalEncoder", "OneHotEncoder"):
        return mf["has_strcat"] >= 0.5
    if label in ("TextPreprocessor", "TextVectorizer"):
        return mf["has_text"] >= 0.5
    if label == "DateFeaturization":
        return mf["has_date"] >= 0.5
    if label == "LinearScaler":
        return mf["count_numeric"] >= 1
    if label == "LogScaler":
        return mf["frac_skew_tailed"] >= LOG_SCALER_SKEW_MIN
    if label == "DataBalancer":
        return task == TaskKind.CLASSIFICATION and mf["target_imbalanced"] >= 0.5
    raise KeyError(label)


def planted_model(task: TaskKind, mf: MetaFeatureVector) -> str:
    """Deterministic model choice the generator plants; recovering it is
    the benchmark for the learned ranker. The rules key on well-separated
    features so a linear ranker can represent them."""
    if task == TaskKind.CLASSIFICATION:
        if mf["has_text"] >= 0.5:
            return "LogisticRegression"
        if mf["target_imbalanced"] >= 0.5:
            return "GradientBoosting"
        if mf["has_strcat"] >= 0.5:
            return "ExtraTrees"
        return "RandomForest"
    if mf["frac_skew_tailed"] >= LOG_SCALER_SKEW_MIN:
        return "GradientBoosting"
    if mf["has_strcat"] >= 0.5:
        return "ExtraTrees"
    return "Lasso"


def _synthetic_meta(rng: random.Random, task: TaskKind) -> MetaFeatureVector:
    # rows are drawn away from the 10^4 model-rule boundary so the planted
    # rule stays learnable by linear rankers
    if rng.random() < 0.5:
        n_rows = int(10 ** rng.uniform(2.0, 3.6))
    else:
        n_rows = int(10 ** rng.uniform(4.4, 6.0))

    has_text = rng.random() < 0.25
    has_date = rng.random() < 0.20
    has_strcat = rng.random() < 0.55
    has_numcat = rng.random() < 0.45
    has_missing = rng.random() < 0.50

    count_text = rng.randint(1, 3) if has_text else 0
    count_date = rng.randint(1, 2) if has_date else 0
    count_strcat = rng.randint(1, 12) if has_strcat else 0
    count_numcat = rng.randint(1, 10) if has_numcat else 0
    count_numeric = rng.randint(1, 80)
    n_features = count_numeric + count_numcat + count_strcat + count_text + count_date

    # bimodal tail-heaviness so the log-scaling rule has signal
    frac_skew_tailed = rng.uniform(0.35, 0.85) if rng.random() < 0.3 else rng.uniform(0.0, 0.15)
    frac_skew_normal = rng.uniform(0.0, 1.0 - frac_skew_tailed)
    frac_kurt_tailed = rng.uniform(0.0, 0.6)
    frac_kurt_normal = rng.uniform(0.0, 1.0 - frac_kurt_tailed)

    if task == TaskKind.REGRESSION:
        r = rng.random()
        target_is_normal = r < 0.3
        target_is_uniform = 0.3 <= r < 0.4
        target_is_poisson = 0.4 <= r < 0.5
        target_imbalanced = False
    else:
        target_is_normal = target_is_uniform = False
        target_is_poisson = rng.random() < 0.1
        target_imbalanced = rng.random() < 0.35

    corr_a = rng.uniform(-1.0, 1.0)
    corr_b = rng.uniform(-1.0, 1.0)
    few = rng.randint(0, count_numeric)
    many = rng.randint(0, max(0, count_numeric - few))
    dominant = rng.randint(0, n_features // 3)
    imbalanced = rng.randint(0, max(0, n_features // 3 - dominant))

    mf = {
        "n_rows": float(n_rows),
        "n_features": float(n_features),
        "n_targets": 1.0,
        "has_missing": float(has_missing),
        "has_numeric": 1.0,
        "has_numcat": float(has_numcat),
        "has_strcat": float(has_strcat),
        "has_text": float(has_text),
        "has_date": float(has_date),
        "count_numeric": float(count_numeric),
        "count_numcat": float(count_numcat),
        "count_strcat": float(count_strcat),
        "count_text": float(count_text),
        "count_date": float(count_date),
        "frac_skew_normal": frac_skew_normal,
        "frac_skew_tailed": frac_skew_tailed,
        "frac_kurt_normal": frac_kurt_normal,
        "frac_kurt_tailed": frac_kurt_tailed,
        "frac_feat_normal": rng.uniform(0.0, 0.6),
        "frac_feat_uniform": rng.uniform(0.0, 0.3),
        "frac_feat_poisson": rng.uniform(0.0, 0.3),
        "target_is_normal": float(target_is_normal),
        "target_is_uniform": float(target_is_uniform),
        "target_is_poisson": float(target_is_poisson),
        "norm_mean": rng.uniform(0.2, 0.8),
        "norm_std": rng.uniform(0.05, 0.45),
        "mean_cv": rng.uniform(0.0, 2.5),
        "corr_min": min(corr_a, corr_b),
        "corr_max": max(corr_a, corr_b),
        "corr_count": float(rng.randint(0, 4)),
        "outlier_few_count": float(few),
        "outlier_many_count": float(many),
        "sparse_count": float(rng.randint(0, n_features // 4)),
        "imbalanced_count": float(imbalanced),
        "dominant_count": float(dominant),
        "target_imbalanced": float(target_imbalanced),
        "target_continuous": float(task == TaskKind.REGRESSION),
        "target_categorical": float(task == TaskKind.CLASSIFICATION),
    }
    validate_meta_vector(mf)
    return mf


def generate_synthetic_corpus(seed: int, n: int,
                              taxonomy: Optional[Taxonomy] = None) -> MetaCorpus:
    """Desk-scale stand-in for a mined corpus: records follow the planted
    rules above, with FE sequences in canonical order. Deterministic in
    the seed; byte-identical across runs."""
    if n < 50:
        raise ValueError(f"synthetic corpus needs n >= 50, got {n}")
    taxonomy = taxonomy or load_taxonomy()
    rng = random.Random(seed)
    by_priority = sorted(taxonomy.fe_labels, key=taxonomy.fe_priority.__getitem__)

    records = []
    for i in range(n):
        task = TaskKind.CLASSIFICATION if rng.random() < 0.7 else TaskKind.REGRESSION
        mf = _synthetic_meta(rng, task)
        fe_sequence = []
        for label in by_priority:
            on_rate, off_rate = PLANTED_FE_RATES[label]
            rate = on_rate if planted_fe_trigger(label, task, mf) else off_rate
            if rng.random() < rate:
                fe_sequence.append(label)
        # human pipelines show no fixed order within the encoder pair or the
        # scaler pair; randomize so order mining leaves them unordered
        for a, b in (("OrdinalEncoder", "OneHotEncoder"), ("LinearScaler", "LogScaler")):
            if a in fe_sequence and b in fe_sequence and rng.random() < 0.5:
                ia, ib = fe_sequence.index(a), fe_sequence.index(b)
                fe_sequence[ia], fe_sequence[ib] = fe_sequence[ib], fe_sequence[ia]
        records.append(AbstractPipeline(
            dataset_id=f"syn-{seed}-{i:04d}",
            task=task,
            meta_features=mf,
            fe_sequence=tuple(fe_sequence),
            model=planted_model(task, mf),
        ))
    return MetaCorpus(records=tuple(records), taxonomy=taxonomy)
