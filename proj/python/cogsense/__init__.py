"""Python access to the cogsense sensing pipeline."""

from ._cogsense import (
    CogsenseError,
    auc,
    auprc,
    default_config,
    evaluate,
    feature_names,
    featurize,
    generate_cohort,
    load_features,
    routine_embedding,
    sensing_feature_count,
)

__all__ = [
    "CogsenseError",
    "auc",
    "auprc",
    "default_config",
    "evaluate",
    "feature_names",
    "featurize",
    "generate_cohort",
    "load_features",
    "routine_embedding",
    "sensing_feature_count",
]
