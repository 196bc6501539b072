"""Train the skeleton predictor on the synthetic corpus and watch it pick
components, infer the columns each transform should touch, and rank the
candidate models for a new dataset.

Run:  python3 demos/03_skeleton_prediction.py
"""

import logging

from pipesynth import (
    Column,
    ColumnKind,
    Dataset,
    TaskKind,
    TrainConfig,
    compute_meta_features,
    generate_synthetic_corpus,
    seed_skeletons,
    train_bundle,
)

logging.basicConfig(level=logging.WARNING)

corpus = generate_synthetic_corpus(seed=42, n=500)
bundle, report = train_bundle(corpus, TrainConfig(seed=0))
print("per-component cross-validated macro-F1:")
for label, info in report["fe"].items():
    score = "constant" if info["constant"] else f"{info['cv_macro_f1']:.3f}"
    print(f"  {label:>18}: {score:<9} features={info['selected_features'][:3]}")

# a dataset with missing numerics and a string-categorical column
n = 60
dataset = Dataset(
    columns=(
        Column("amount", ColumnKind.NUMERIC,
               tuple(float(i) * 1.3 if i % 4 else None for i in range(n))),
        Column("balance", ColumnKind.NUMERIC,
               tuple(float(i) ** 1.1 if i % 6 else None for i in range(n))),
        Column("segment", ColumnKind.STRING_CATEGORY,
               tuple("ab"[i % 2] for i in range(n))),
        Column("age", ColumnKind.NUMERIC, tuple(float(20 + i % 50) for i in range(n))),
        Column("churn", ColumnKind.NUMBER_CATEGORY, tuple(float(i % 2) for i in range(n))),
    ),
    target_names=("churn",),
    task=TaskKind.CLASSIFICATION,
)

mf = compute_meta_features(dataset)
skeletons = seed_skeletons(bundle, dataset, mf, k=3)
print("\nskeletons (shared FE set, one model each):")
for skeleton in skeletons:
    print(f"  rank {skeleton.model_rank}: MODEL {skeleton.model} "
          f"(score {skeleton.model_score:.3f})")
for choice in skeletons[0].fe:
    print(f"    FE {choice.label} p={choice.prob:.2f} columns={list(choice.columns)}")
