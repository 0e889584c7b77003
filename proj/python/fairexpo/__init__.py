"""Exposure-fair ranking core: preference math, clustering, fairness
planning, diversity-constrained ranking, and evaluation metrics."""

from fairexpo._core import (
    aspect_shares,
    default_gamma,
    gini,
    hhi,
    item_targets,
    k_prototypes,
    kl_divergence,
    lorenz_points,
    normalized_rmse,
    preference_score,
    rank_list,
    total_inventory,
)

__all__ = [
    "aspect_shares",
    "default_gamma",
    "gini",
    "hhi",
    "item_targets",
    "k_prototypes",
    "kl_divergence",
    "lorenz_points",
    "normalized_rmse",
    "preference_score",
    "rank_list",
    "total_inventory",
]
