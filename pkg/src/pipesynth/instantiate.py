"""Pipeline instantiation: order a predicted component set along the mined
DAG, discard redundant components, and emit a concrete script from the
template pack.

Emission is a pure function of (skeleton, dataset schema, template pack
version): running it twice yields byte-identical sources.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .corpus import MODEL_NODE, OrderDag, Taxonomy, load_taxonomy
from .errors import (
    CycleDetected,
    EmptyColumnHole,
    MissingTemplate,
    NoSkeletons,
    UnknownComponent,
)
from .predictor import FeChoice, Skeleton
from .tabular import ColumnKind, Dataset, NUMBER_VALUED, TaskKind

log = logging.getLogger(__name__)

RESULT_MARKER = "RESULT:"


@dataclass(frozen=True)
class Schema:
    """The part of a dataset that emission depends on."""

    column_kinds: tuple[tuple[str, ColumnKind], ...]
    target_names: tuple[str, ...]
    task: TaskKind
    delimiter: str = ","
    metric: Optional[str] = None  # override; default follows the task

    @classmethod
    def from_dataset(cls, dataset: Dataset, delimiter: str = ",",
                     metric: Optional[str] = None) -> "Schema":
        return cls(
            column_kinds=tuple((c.name, c.kind) for c in dataset.columns),
            target_names=dataset.target_names,
            task=dataset.task,
            delimiter=delimiter,
            metric=metric,
        )

    def kind_of(self, name: str) -> ColumnKind:
        for n, k in self.column_kinds:
            if n == name:
                return k
        raise KeyError(name)

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.column_kinds)


@dataclass(frozen=True)
class SnippetTemplate:
    label: str
    variant: str
    stage: str
    holes: tuple[str, ...]
    body: str
    task: Optional[str] = None  # "C"/"R" for model and evaluation snippets

    def fill(self, values: dict[str, str]) -> str:
        text = self.body
        for hole in self.holes:
            if hole not in values:
                raise EmptyColumnHole(f"{self.label}/{self.variant}: no value for hole {hole}")
            text = text.replace("{" + hole + "}", values[hole])
        return text


class TemplatePack:
    """Directory of snippet bodies plus a JSON manifest."""

    def __init__(self, version: str, snippets: list[SnippetTemplate]):
        self.version = version
        self._snippets = snippets

    @classmethod
    def load(cls, root: Optional[Path] = None) -> "TemplatePack":
        if root is None:
            root = resources.files("pipesynth") / "assets" / "templates" / "v1"
        manifest = json.loads((root / "manifest.json").read_text(encoding="utf-8"))
        snippets = []
        for entry in manifest["snippets"]:
            body = (root / entry["file"]).read_text(encoding="utf-8")
            snippets.append(SnippetTemplate(
                label=entry["label"],
                variant=entry["variant"],
                stage=entry["stage"],
                holes=tuple(entry["holes"]),
                body=body,
                task=entry.get("task"),
            ))
        return cls(version=manifest["version"], snippets=snippets)

    def get(self, label: str, variant: str = "Default",
            task: Optional[str] = None) -> SnippetTemplate:
        for s in self._snippets:
            if s.label == label and s.variant == variant and s.task in (None, task):
                return s
        raise MissingTemplate(f"no template for label={label} variant={variant} task={task}")

    def variants_of(self, label: str) -> list[str]:
        return [s.variant for s in self._snippets if s.label == label]


@dataclass(frozen=True)
class OrderedSkeleton:
    fe_ordered: tuple[FeChoice, ...]
    model: str
    model_rank: int
    hyperparams: dict

    def to_json_obj(self) -> dict:
        return {
            "fe_ordered": [
                {"label": c.label, "prob": c.prob, "columns": list(c.columns)}
                for c in self.fe_ordered
            ],
            "model": self.model,
            "model_rank": self.model_rank,
            "hyperparams": dict(self.hyperparams),
        }


@dataclass(frozen=True)
class CandidatePipeline:
    source: str
    skeleton: OrderedSkeleton
    model_rank: int
    hyperparam_index: int
    script_id: str


def construct_dag(components: Sequence[str], g: OrderDag) -> OrderDag:
    """Induced ordering over the predicted components plus the MODEL sink.

    Mined relations that pass through absent components survive: the
    closure of g is taken first, then restricted and reduced."""
    keep = set(components) | {MODEL_NODE}
    for c in components:
        if c not in g.nodes:
            raise UnknownComponent(f"{c!r} is not a node of the order DAG")
    closure_edges: dict[tuple[str, str], int] = {}
    for a in g.nodes:
        if a not in keep:
            continue
        support_a = g.node_support.get(a, 1)
        for b in g.reachable_from(a):
            if b in keep:
                closure_edges[(a, b)] = g.edges.get((a, b), support_a)
    sub = OrderDag(
        nodes=tuple(sorted(keep & set(g.nodes))),
        edges=closure_edges,
        node_support={n: g.node_support.get(n, 0) for n in keep},
    )
    sub.transitively_reduce()
    return sub


def discard_redundant(g: OrderDag, choices: Sequence[FeChoice]) -> tuple[OrderDag, list[FeChoice]]:
    """Within each DAG level, components applied to identical column sets
    are redundant: keep the highest-probability one (ties: higher corpus
    frequency, then lexicographic). Removed nodes are bridged so the
    surviving order is preserved. Removal changes the level structure, so
    the pass repeats until no level holds two identical column sets."""
    by_label = {c.label: c for c in choices}
    out = OrderDag(nodes=g.nodes, edges=dict(g.edges), node_support=dict(g.node_support))
    all_removed: set[str] = set()
    while True:
        levels = out.levels()
        groups: dict[tuple[int, frozenset], list[str]] = {}
        for node in out.nodes:
            if node == MODEL_NODE or node not in by_label:
                continue
            key = (levels[node], frozenset(by_label[node].columns))
            groups.setdefault(key, []).append(node)

        removed = []
        for key, members in sorted(groups.items(), key=lambda kv: (kv[0][0], sorted(kv[1]))):
            if len(members) < 2:
                continue
            members.sort(key=lambda n: (-by_label[n].prob, -out.node_support.get(n, 0), n))
            removed.extend(members[1:])
        if not removed:
            break

        edges = dict(out.edges)
        nodes = list(out.nodes)
        for node in removed:
            preds = [a for (a, b) in edges if b == node]
            succs = [b for (a, b) in edges if a == node]
            for a in preds:
                for b in succs:
                    edges.setdefault((a, b), min(edges[(a, node)], edges[(node, b)]))
            edges = {(a, b): s for (a, b), s in edges.items() if node not in (a, b)}
            nodes.remove(node)
            log.info("discarding redundant component %s", node)
        all_removed.update(removed)
        out = OrderDag(nodes=tuple(nodes), edges=edges,
                       node_support={n: out.node_support.get(n, 0) for n in nodes})

    survivors = [c for c in choices if c.label not in all_removed]
    return out, survivors


def total_order(g: OrderDag, taxonomy: Optional[Taxonomy] = None) -> list[str]:
    """Kahn's topological sort; among ready nodes: pre-detach components
    first, then the canonical priority, then the name. The MODEL sink
    comes last by construction."""
    taxonomy = taxonomy or load_taxonomy()

    def sort_key(node: str):
        if node == MODEL_NODE:
            return (2, 0, node)
        stage = 0 if taxonomy.fe_stage[node] == "pre_detach" else 1
        return (stage, taxonomy.fe_priority[node], node)

    indegree = {n: 0 for n in g.nodes}
    for (_, b) in g.edges:
        indegree[b] += 1
    ready = [n for n, d in indegree.items() if d == 0]
    out: list[str] = []
    while ready:
        ready.sort(key=sort_key)
        node = ready.pop(0)
        out.append(node)
        for s in g.successors(node):
            indegree[s] -= 1
            if indegree[s] == 0:
                ready.append(s)
    if len(out) != len(g.nodes):
        raise CycleDetected("order DAG contains a cycle; the asset is corrupt")
    return out


def _column_list_literal(columns: Sequence[str]) -> str:
    return "[" + ", ".join(repr(c) for c in columns) + "]"


def _hyperparams_literal(hp: dict) -> str:
    return ", ".join(f"{k}={v!r}" for k, v in hp.items())


def _fe_sections(choice: FeChoice, schema: Schema, templates: TemplatePack) -> list[tuple[str, str]]:
    """(section title, filled body) pairs for one FE component. The imputer
    is split into numeric/string variants by column kind; a variant with no
    columns is omitted."""
    variants = templates.variants_of(choice.label)
    if set(variants) >= {"NumericColumns", "StringColumns"}:
        numeric = [c for c in choice.columns if schema.kind_of(c) in NUMBER_VALUED]
        string = [c for c in choice.columns if schema.kind_of(c) not in NUMBER_VALUED]
        parts = []
        if numeric:
            body = templates.get(choice.label, "NumericColumns").fill(
                {"COLUMNS": _column_list_literal(numeric)})
            parts.append((f"{choice.label} (numeric)", body))
        if string:
            body = templates.get(choice.label, "StringColumns").fill(
                {"COLUMNS": _column_list_literal(string)})
            parts.append((f"{choice.label} (string)", body))
        if not parts:
            raise EmptyColumnHole(f"{choice.label}: no columns after variant split")
        return parts
    template = templates.get(choice.label, "Default")
    values = {}
    if "COLUMNS" in template.holes:
        if not choice.columns:
            raise EmptyColumnHole(f"{choice.label}: empty column hole")
        values["COLUMNS"] = _column_list_literal(choice.columns)
    return [(choice.label, template.fill(values))]


def instantiate_pipeline(ordered: OrderedSkeleton, schema: Schema,
                         templates: TemplatePack, script_id: str,
                         hyperparam_index: int = 0) -> CandidatePipeline:
    """Emit one concrete pipeline script: load, pre-detach transforms,
    target detach, post-detach transforms, model, evaluation with a single
    RESULT:<float> line."""
    if len(schema.target_names) != 1:
        raise EmptyColumnHole("template pack v1 emits single-target pipelines only")
    target = schema.target_names[0]
    for choice in ordered.fe_ordered:
        unknown = [c for c in choice.columns if c not in schema.column_names]
        if unknown:
            raise EmptyColumnHole(f"{choice.label}: columns not in schema: {unknown}")

    task_code = "C" if schema.task == TaskKind.CLASSIFICATION else "R"
    metric = schema.metric or ("macro_f1" if task_code == "C" else "r2")
    eval_code = "C" if metric == "macro_f1" else "R"
    taxonomy = load_taxonomy()

    sections: list[tuple[str, str]] = []
    sections.append(("LOAD DATA", templates.get("LoadData").fill({"DELIMITER": schema.delimiter})))

    pre = [c for c in ordered.fe_ordered if taxonomy.fe_stage[c.label] == "pre_detach"]
    post = [c for c in ordered.fe_ordered if taxonomy.fe_stage[c.label] == "post_detach"]

    transform_no = 0
    for choice in pre:
        for title, body in _fe_sections(choice, schema, templates):
            transform_no += 1
            sections.append((f"FE TRANSFORM {transform_no}: {title}", body))

    sections.append(("DETACH TARGET", templates.get("DetachTarget").fill({"TARGET": repr(target)})))

    for choice in post:
        for title, body in _fe_sections(choice, schema, templates):
            transform_no += 1
            sections.append((f"FE TRANSFORM {transform_no}: {title}", body))

    model_tpl = templates.get(ordered.model, "Default", task=task_code)
    sections.append((f"MODEL: {ordered.model}",
                     model_tpl.fill({"HYPERPARAMS": _hyperparams_literal(ordered.hyperparams)})))
    sections.append(("EVALUATION",
                     templates.get("Evaluation", task=eval_code).fill({"METRIC": metric})))

    chunks = []
    for title, body in sections:
        chunks.append(f"# {title}\n{body}")
    source = "\n".join(chunks)
    assert source.count(RESULT_MARKER) == 1
    return CandidatePipeline(
        source=source,
        skeleton=ordered,
        model_rank=ordered.model_rank,
        hyperparam_index=hyperparam_index,
        script_id=script_id,
    )


def order_skeleton(skeleton: Skeleton, g: OrderDag,
                   taxonomy: Optional[Taxonomy] = None,
                   hyperparams: Optional[dict] = None) -> OrderedSkeleton:
    """Algorithm steps 2-4 for one skeleton: construct the induced DAG,
    discard redundant components, and totally order the survivors."""
    taxonomy = taxonomy or load_taxonomy()
    sub = construct_dag([c.label for c in skeleton.fe], g)
    sub, survivors = discard_redundant(sub, skeleton.fe)
    order = total_order(sub, taxonomy)
    by_label = {c.label: c for c in survivors}
    fe_ordered = tuple(by_label[n] for n in order if n != MODEL_NODE)
    return OrderedSkeleton(
        fe_ordered=fe_ordered,
        model=skeleton.model,
        model_rank=skeleton.model_rank,
        hyperparams=dict(hyperparams or {}),
    )


def build_candidates(skeletons: Sequence[Skeleton], g: OrderDag,
                     templates: TemplatePack, catalog: dict[str, list[dict]],
                     schema: Schema,
                     taxonomy: Optional[Taxonomy] = None) -> list[CandidatePipeline]:
    """Cross product of skeletons and the hyperparameter sets of each
    skeleton's model, ordered by (model rank, hyperparameter index)."""
    if not skeletons:
        raise NoSkeletons("pipeline seeding produced no skeletons")
    taxonomy = taxonomy or load_taxonomy()
    out = []
    for skeleton in sorted(skeletons, key=lambda s: s.model_rank):
        hp_sets = catalog.get(skeleton.model) or [{}]
        for hp_index, hp in enumerate(hp_sets):
            ordered = order_skeleton(skeleton, g, taxonomy, hp)
            script_id = f"r{skeleton.model_rank}_h{hp_index}_{skeleton.model}"
            out.append(instantiate_pipeline(ordered, schema, templates, script_id, hp_index))
    return out


def static_scan(candidate: CandidatePipeline, schema: Schema) -> list[str]:
    """Static contract check on an emitted script: exactly one RESULT
    marker and only schema-present columns in the filled holes. Returns a
    list of violations (empty when clean)."""
    problems = []
    if candidate.source.count(RESULT_MARKER) != 1:
        problems.append("expected exactly one RESULT: marker")
    for choice in candidate.skeleton.fe_ordered:
        for col in choice.columns:
            if col not in schema.column_names:
                problems.append(f"{choice.label}: unknown column {col!r}")
    for match in re.finditer(r"\{(COLUMNS|TARGET|HYPERPARAMS|METRIC|DELIMITER)\}", candidate.source):
        problems.append(f"unfilled hole {match.group(0)}")
    return problems
