"""Offline top-N recommender benchmark.

Load interaction and item-content data, hide part of each evaluation user's
profile, produce ranked lists with collaborative and content-based
algorithms, and score them with ranking-quality and coverage metrics across
cross-validation folds.
"""

from .corpus import (
    ContentCorpus,
    DatasetStats,
    HoldoutSplit,
    Interaction,
    InteractionDataset,
    ItemDocument,
    SplitPlan,
    compute_stats,
    load_content,
    load_interactions,
    materialize_split,
    plan_splits,
)
from .errors import (
    ColdStartError,
    ConfigurationError,
    EmptyDatasetError,
    ParseError,
    ProtocolError,
    RecbenchError,
    UndefinedMetricError,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    IntersectionRecord,
    ReportRecord,
    emit_plot_data,
    emit_report,
    read_run_lists,
    run_experiment,
    selection_label,
    summarize,
    write_run_dir,
)
from .metrics import (
    EvalInput,
    IntersectionReport,
    MetricReport,
    average_precision_at_k,
    ccov_at_k,
    evaluate,
    hit_intersection,
    jaccard_list_similarity,
    map_at_k,
    ucov_at_k,
)
from .recommenders import (
    CFModel,
    RecommendationList,
    SUPModel,
    UPAModel,
    UserProfile,
    fit_cf,
    fit_sup,
    fit_upa,
    recommend_cf,
    recommend_sup,
    recommend_upa,
)
from .textproc import (
    DocumentIndex,
    SparseVector,
    Vocabulary,
    build_index,
    cosine,
    default_stopwords,
    load_stopwords,
    tokenize,
    top_k_similar,
)

__version__ = "0.1.0"

__all__ = [
    "ColdStartError",
    "ConfigurationError",
    "ContentCorpus",
    "CFModel",
    "DatasetStats",
    "DocumentIndex",
    "EmptyDatasetError",
    "EvalInput",
    "ExperimentConfig",
    "ExperimentResult",
    "HoldoutSplit",
    "Interaction",
    "InteractionDataset",
    "IntersectionRecord",
    "IntersectionReport",
    "ItemDocument",
    "MetricReport",
    "ParseError",
    "ProtocolError",
    "RecbenchError",
    "RecommendationList",
    "ReportRecord",
    "SUPModel",
    "SparseVector",
    "SplitPlan",
    "UPAModel",
    "UndefinedMetricError",
    "UserProfile",
    "Vocabulary",
    "average_precision_at_k",
    "build_index",
    "ccov_at_k",
    "compute_stats",
    "cosine",
    "default_stopwords",
    "emit_plot_data",
    "emit_report",
    "evaluate",
    "fit_cf",
    "fit_sup",
    "fit_upa",
    "hit_intersection",
    "jaccard_list_similarity",
    "load_content",
    "load_interactions",
    "load_stopwords",
    "map_at_k",
    "materialize_split",
    "plan_splits",
    "read_run_lists",
    "recommend_cf",
    "recommend_sup",
    "recommend_upa",
    "run_experiment",
    "selection_label",
    "summarize",
    "tokenize",
    "top_k_similar",
    "ucov_at_k",
    "write_run_dir",
]
