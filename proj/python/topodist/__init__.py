"""Topology distance and related generative-model evaluation metrics."""

from ._topodist import (
    TopodistError,
    __version__,
    bottleneck_distance,
    connect_threshold,
    fid,
    fid_from_stats,
    gs,
    inception_score,
    inception_score_splits,
    kid,
    longevity_vector,
    pairwise_distances,
    persistence_dim0,
    persistence_dim1,
    read_features,
    rlt,
    sample_gaussian,
    sample_matched_mixture,
    td,
    wasserstein_distance,
    write_features,
)

__all__ = [
    "TopodistError",
    "__version__",
    "bottleneck_distance",
    "connect_threshold",
    "fid",
    "fid_from_stats",
    "gs",
    "inception_score",
    "inception_score_splits",
    "kid",
    "longevity_vector",
    "pairwise_distances",
    "persistence_dim0",
    "persistence_dim1",
    "read_features",
    "rlt",
    "sample_gaussian",
    "sample_matched_mixture",
    "td",
    "wasserstein_distance",
    "write_features",
]
