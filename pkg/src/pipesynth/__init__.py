"""pipesynth: batch synthesis of ML pipeline scripts for tabular
prediction tasks.

Given a dataset and a supervised task, the engine predicts a set of
plausible pipeline components from dataset meta-features (seeding),
orders and instantiates them into concrete scripts (instantiation), and
selects the best by running the candidates on an internal split
(validation). The predictors are trained from a corpus of abstract
pipelines.
"""

from .tabular import (
    Column,
    ColumnKind,
    Dataset,
    KindConfig,
    TaskKind,
    infer_column_kind,
    load_csv,
    split_rows,
    write_csv,
)
from .metafeatures import (
    META_FEATURES,
    META_FEATURE_GROUPS,
    column_feature_value,
    compute_meta_features,
    kurtosis,
    pearson,
    skewness,
    validate_meta_vector,
)
from .corpus import (
    AbstractPipeline,
    MetaCorpus,
    OrderDag,
    Taxonomy,
    canonicalize_label,
    generate_synthetic_corpus,
    load_default_order_dag,
    load_hyperparam_catalog,
    load_taxonomy,
    mine_order_dag,
    parse_corpus,
    serialize_corpus,
)
from .predictor import (
    Condition,
    DecisionTree,
    FeChoice,
    ModelRanker,
    Skeleton,
    SkeletonPredictorBundle,
    TrainConfig,
    extract_decision_path,
    generate_skeletons,
    infer_relevant_columns,
    point_biserial,
    predict_fe,
    rank_models,
    seed_skeletons,
    select_features,
    train_bundle,
    train_fe_tree,
    train_model_ranker,
)
from .instantiate import (
    CandidatePipeline,
    OrderedSkeleton,
    Schema,
    SnippetTemplate,
    TemplatePack,
    build_candidates,
    construct_dag,
    discard_redundant,
    instantiate_pipeline,
    order_skeleton,
    static_scan,
    total_order,
)
from .validate import (
    EvalResult,
    ExecutorConfig,
    SelectionOutcome,
    finalize,
    internal_split,
    run_candidates,
    select_best,
)
from .cli import SynthesisConfig, cmd_synthesize, cmd_train

__version__ = "0.1.0"
