"""Command-line entry points.

    pipesynth train --corpus F --out B [--seed N]
    pipesynth synthesize --bundle B --train F [--test F] --target COL
                         [--task c|r] [--k 3] [--exec CMD] [--timeout S]
                         [--out DIR] [--seed N]

A JSON config file (--config) may supply any flag; explicit flags win.
Exit codes: 0 success, 1 synthesis-quality failure, 2 usage/config
errors, 3 data errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import corpus as corpus_mod
from . import metafeatures
from .errors import ConfigError, DataError, PipesynthError, SynthesisFailure
from .instantiate import Schema, TemplatePack, build_candidates, static_scan
from .predictor import SkeletonPredictorBundle, TrainConfig, seed_skeletons, train_bundle
from .tabular import TaskKind, load_csv
from .validate import ExecutorConfig, finalize, internal_split, run_candidates, select_best, write_results

log = logging.getLogger(__name__)

_DEFAULTS = {
    "seed": 0,
    "k": 3,
    "fe_cutoff": 0.5,
    "pb_threshold": 0.1,
    "min_support": 0.8,
    "timeout": 600.0,
    "overall_budget": 3600.0,
    "max_parallel": 1,
    "delimiter": ",",
    "out": "pipesynth_out",
    "metric": None,
}


def default_exec_command() -> str:
    return f"{sys.executable} {{script}} --workdir {{workdir}}"


@dataclass
class SynthesisConfig:
    target: str
    train_path: str
    test_path: Optional[str] = None
    corpus_path: Optional[str] = None
    bundle_path: Optional[str] = None
    task: Optional[TaskKind] = None
    k: int = 3
    fe_cutoff: float = 0.5
    pb_threshold: float = 0.1
    min_support: float = 0.8
    seed: int = 0
    exec_command: Optional[str] = None
    timeout: float = 600.0
    overall_budget: float = 3600.0
    max_parallel: int = 1
    out_dir: str = "pipesynth_out"
    metric: Optional[str] = None
    delimiter: str = ","

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if (self.corpus_path is None) == (self.bundle_path is None):
            raise ConfigError("exactly one of --corpus / --bundle is required")
        if self.metric not in (None, "macro_f1", "r2"):
            raise ConfigError(f"unknown metric override {self.metric!r}")

    def executor(self) -> ExecutorConfig:
        return ExecutorConfig(
            command_template=self.exec_command or default_exec_command(),
            timeout=self.timeout,
            max_parallel=self.max_parallel,
            overall_budget=self.overall_budget,
        )


def cmd_train(corpus_path: str, out_bundle: str, seed: int = 0,
              pb_threshold: float = 0.1, min_support: float = 0.8) -> SkeletonPredictorBundle:
    """Train the skeleton predictor from a corpus file. Writes the bundle,
    a training report, and the mined order DAG next to it."""
    corpus = corpus_mod.parse_corpus(corpus_path)
    cfg = TrainConfig(seed=seed, pb_threshold=pb_threshold)
    bundle, report = train_bundle(corpus, cfg)
    bundle.save(out_bundle)
    Path(out_bundle + ".report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if corpus.records:
        dag = corpus_mod.mine_order_dag(corpus, min_support)
        Path(out_bundle + ".dag.json").write_text(dag.to_json() + "\n", encoding="utf-8")
    log.info("bundle written to %s (%d FE trees)", out_bundle, len(bundle.fe_trees))
    return bundle


def _resolve_bundle_and_dag(cfg: SynthesisConfig) -> tuple[SkeletonPredictorBundle, corpus_mod.OrderDag]:
    if cfg.bundle_path is not None:
        if not Path(cfg.bundle_path).exists():
            raise ConfigError(f"bundle not found: {cfg.bundle_path}")
        bundle = SkeletonPredictorBundle.load(cfg.bundle_path)
        dag_path = Path(cfg.bundle_path + ".dag.json")
        if dag_path.exists():
            dag = corpus_mod.OrderDag.from_json(dag_path.read_text(encoding="utf-8"))
            log.info("using mined order DAG %s", dag_path)
        else:
            dag = corpus_mod.load_default_order_dag()
            log.info("using the default order DAG asset")
        return bundle, dag
    corpus = corpus_mod.parse_corpus(cfg.corpus_path)
    train_cfg = TrainConfig(seed=cfg.seed, pb_threshold=cfg.pb_threshold, fe_cutoff=cfg.fe_cutoff)
    bundle, _ = train_bundle(corpus, train_cfg)
    dag = corpus_mod.mine_order_dag(corpus, cfg.min_support)
    return bundle, dag


def cmd_synthesize(cfg: SynthesisConfig) -> dict:
    """End-to-end synthesis. Returns the summary dict that is also written
    to <out>/summary.json."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    taxonomy = corpus_mod.load_taxonomy()

    bundle, dag = _resolve_bundle_and_dag(cfg)
    train_data = load_csv(cfg.train_path, [cfg.target], cfg.task, cfg.delimiter)
    test_data = None
    if cfg.test_path:
        test_data = load_csv(cfg.test_path, [cfg.target], train_data.task, cfg.delimiter)

    mf = metafeatures.compute_meta_features(train_data)
    (out_dir / "meta_features.json").write_text(
        metafeatures.to_json(mf) + "\n", encoding="utf-8")

    skeletons = seed_skeletons(bundle, train_data, mf, cfg.k, cfg.fe_cutoff, taxonomy)
    (out_dir / "skeletons.json").write_text(
        json.dumps([s.to_json_obj() for s in skeletons], indent=2) + "\n", encoding="utf-8")

    templates = TemplatePack.load()
    catalog = corpus_mod.load_hyperparam_catalog(taxonomy=taxonomy)
    schema = Schema.from_dataset(train_data, cfg.delimiter, metric=cfg.metric)
    candidates = build_candidates(skeletons, dag, templates, catalog, schema, taxonomy)
    for candidate in candidates:
        problems = static_scan(candidate, schema)
        if problems:
            raise ConfigError(f"{candidate.script_id}: emitted script violates contract: {problems}")
    (out_dir / "candidates.json").write_text(json.dumps([
        {
            "script_id": c.script_id,
            "model_rank": c.model_rank,
            "hyperparam_index": c.hyperparam_index,
            "skeleton": c.skeleton.to_json_obj(),
            "path": f"candidates/{c.script_id}/pipeline.py",
        }
        for c in candidates
    ], indent=2) + "\n", encoding="utf-8")

    inner_train, inner_valid = internal_split(train_data, cfg.seed)
    executor = cfg.executor()
    results = run_candidates(candidates, inner_train, inner_valid, out_dir, executor, cfg.delimiter)
    write_results(results, out_dir / "results.json")

    outcome = select_best(results, candidates)
    best = next(c for c in candidates if c.script_id == outcome.best_script_id)
    final_result = finalize(best, train_data, test_data, out_dir, executor, cfg.delimiter)
    if final_result is not None and final_result.status == "ok":
        outcome.final_test_score = final_result.score
    elif final_result is not None:
        raise SynthesisFailure(
            f"final run of {best.script_id} failed with status {final_result.status} "
            f"(log: {final_result.log_path})")

    summary = {
        "target": cfg.target,
        "task": train_data.task.value,
        "metric": cfg.metric or ("macro_f1" if train_data.task == TaskKind.CLASSIFICATION else "r2"),
        "k": cfg.k,
        "seed": cfg.seed,
        "n_candidates": len(candidates),
        "best_script_id": outcome.best_script_id,
        "validation_score": outcome.validation_score,
        "final_test_score": outcome.final_test_score,
        "train_path": str(cfg.train_path),
        "test_path": str(cfg.test_path) if cfg.test_path else None,
    }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    log.info("best pipeline: %s (validation %.4f)", outcome.best_script_id, outcome.validation_score)
    return summary


def _effective(args: argparse.Namespace, config: dict, key: str, fallback=None):
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return _DEFAULTS.get(key, fallback)


def _load_config_file(args: argparse.Namespace) -> dict:
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            return json.load(fh)
    return {}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pipesynth", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a skeleton predictor bundle from a corpus")
    p_train.add_argument("--corpus", help="JSON-Lines corpus file")
    p_train.add_argument("--out", help="bundle output path")
    p_train.add_argument("--seed", type=int)
    p_train.add_argument("--config", help="JSON config file; flags win")

    p_syn = sub.add_parser("synthesize", help="synthesize a pipeline for a dataset")
    p_syn.add_argument("--bundle", help="trained bundle path")
    p_syn.add_argument("--corpus", help="corpus file (train the bundle on the fly)")
    p_syn.add_argument("--train", help="training CSV")
    p_syn.add_argument("--test", help="held-out test CSV")
    p_syn.add_argument("--target", help="target column name")
    p_syn.add_argument("--task", choices=["c", "r"])
    p_syn.add_argument("--k", type=int)
    p_syn.add_argument("--exec", dest="exec_command", help="executor command template")
    p_syn.add_argument("--timeout", type=float)
    p_syn.add_argument("--out", help="artifact directory")
    p_syn.add_argument("--seed", type=int)
    p_syn.add_argument("--config", help="JSON config file; flags win")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config_file(args)
        if args.command == "train":
            corpus_path = args.corpus or config.get("corpus")
            out_bundle = args.out or config.get("out")
            if not corpus_path or not out_bundle:
                raise ConfigError("train requires --corpus and --out")
            cmd_train(corpus_path, out_bundle, seed=int(_effective(args, config, "seed")))
            return 0

        task_code = _effective(args, config, "task")
        task = None
        if task_code:
            task = TaskKind.CLASSIFICATION if task_code == "c" else TaskKind.REGRESSION
        train_path = _effective(args, config, "train")
        target = _effective(args, config, "target")
        if not train_path or not target:
            raise ConfigError("synthesize requires --train and --target")
        cfg = SynthesisConfig(
            target=target,
            train_path=train_path,
            test_path=_effective(args, config, "test"),
            corpus_path=_effective(args, config, "corpus"),
            bundle_path=_effective(args, config, "bundle"),
            task=task,
            k=int(_effective(args, config, "k")),
            fe_cutoff=float(_effective(args, config, "fe_cutoff")),
            pb_threshold=float(_effective(args, config, "pb_threshold")),
            min_support=float(_effective(args, config, "min_support")),
            seed=int(_effective(args, config, "seed")),
            exec_command=_effective(args, config, "exec_command") or config.get("exec"),
            timeout=float(_effective(args, config, "timeout")),
            overall_budget=float(_effective(args, config, "overall_budget")),
            max_parallel=int(_effective(args, config, "max_parallel")),
            out_dir=str(_effective(args, config, "out")),
            metric=_effective(args, config, "metric"),
            delimiter=str(_effective(args, config, "delimiter")),
        )
        cmd_synthesize(cfg)
        return 0
    except ConfigError as exc:
        log.error("%s", exc)
        return 2
    except DataError as exc:
        log.error("%s", exc)
        return 3
    except SynthesisFailure as exc:
        log.error("%s", exc)
        return 1
    except PipesynthError as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
