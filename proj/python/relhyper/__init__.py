"""Relation directions in word embedding spaces.

A thin wrapper over the C++ core: vector space loading and exact top-k cosine
search, BATS-style relation parsing, the relation models (svmcos, lrcos,
cosavg3, pca_lr, nn_linear, nn_nonlinear), leave-one-out evaluation with
micro-averaged sensitivity/MAP/F1, and offset geometry statistics.
"""

from relhyper._core import (
    CacheError,
    CategoryEval,
    ModelConfig,
    NumericError,
    ParseError,
    RelationCategory,
    RelationPair,
    ResolvedCategory,
    ResolvedPair,
    TrainedRelationModel,
    VectorSpaceModel,
    __version__,
    aggregate,
    average_precision,
    build_vsm,
    cosine,
    first_principal_component,
    fit,
    load_vsm,
    loo_evaluate,
    offset_stats,
    parse_bats_directory,
    parse_bats_file,
    percentile,
    query_point,
    rank,
    resolve,
    train_linear_svm,
)

__all__ = [
    "CacheError",
    "CategoryEval",
    "ModelConfig",
    "NumericError",
    "ParseError",
    "RelationCategory",
    "RelationPair",
    "ResolvedCategory",
    "ResolvedPair",
    "TrainedRelationModel",
    "VectorSpaceModel",
    "__version__",
    "aggregate",
    "average_precision",
    "build_vsm",
    "cosine",
    "first_principal_component",
    "fit",
    "load_vsm",
    "loo_evaluate",
    "offset_stats",
    "parse_bats_directory",
    "parse_bats_file",
    "percentile",
    "query_point",
    "rank",
    "resolve",
    "train_linear_svm",
]
