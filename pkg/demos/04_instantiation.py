"""Order a predicted component set along the default DAG, discard the
redundant encoder, and emit the concrete pipeline script.

Run:  python3 demos/04_instantiation.py
"""

from pipesynth import (
    Column,
    ColumnKind,
    Dataset,
    FeChoice,
    Schema,
    Skeleton,
    TaskKind,
    TemplatePack,
    instantiate_pipeline,
    load_default_order_dag,
    order_skeleton,
)

# the motivating fraud-detection example: five predicted FE components,
# the two encoders targeting the same columns
features = ("card2", "card3", "card4", "ProductCD", "TransactionAmt")
skeleton = Skeleton(
    fe=(
        FeChoice("Imputer", 0.81, ("card2", "card3")),
        FeChoice("OrdinalEncoder", 0.73, ("card4", "ProductCD")),
        FeChoice("OneHotEncoder", 0.70, ("card4", "ProductCD")),
        FeChoice("LinearScaler", 0.69, features),
        FeChoice("DataBalancer", 0.58, features),
    ),
    model="CatBoost",
    model_rank=1,
    model_score=0.9,
)

ordered = order_skeleton(skeleton, load_default_order_dag())
print("ordered skeleton:", " -> ".join(c.label for c in ordered.fe_ordered),
      "->", ordered.model)
print("(OneHotEncoder shares its columns with the higher-probability",
      "OrdinalEncoder and is discarded)\n")

n = 10
dataset = Dataset(
    columns=(
        Column("card2", ColumnKind.NUMERIC, tuple(float(i) if i % 2 else None for i in range(n))),
        Column("card3", ColumnKind.NUMERIC, tuple(float(i) if i % 3 else None for i in range(n))),
        Column("card4", ColumnKind.STRING_CATEGORY, ("visa",) * n),
        Column("ProductCD", ColumnKind.STRING_CATEGORY, ("W",) * n),
        Column("TransactionAmt", ColumnKind.NUMERIC, tuple(float(i) + 0.5 for i in range(n))),
        Column("isFraud", ColumnKind.NUMBER_CATEGORY, tuple(float(i % 2) for i in range(n))),
    ),
    target_names=("isFraud",),
    task=TaskKind.CLASSIFICATION,
)

candidate = instantiate_pipeline(ordered, Schema.from_dataset(dataset),
                                 TemplatePack.load(), script_id="demo")
print(candidate.source)
