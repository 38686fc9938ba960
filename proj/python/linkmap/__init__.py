"""Python bindings for the linkmap hyperlink-graph pipeline."""

from ._linkmap import (
    CandidateScore,
    ForestModel,
    Graph,
    HitsResult,
    MwuResult,
    canonicalize_url,
    candidate_pipeline,
    hits,
    load_graph,
    mann_whitney_u,
    pearson,
    pr_auc,
    roc_auc,
    save_graph,
    ssc,
    load_model,
    predict_proba,
)

__all__ = [
    "CandidateScore",
    "ForestModel",
    "Graph",
    "HitsResult",
    "MwuResult",
    "canonicalize_url",
    "candidate_pipeline",
    "hits",
    "load_graph",
    "mann_whitney_u",
    "pearson",
    "pr_auc",
    "roc_auc",
    "save_graph",
    "ssc",
    "load_model",
    "predict_proba",
]
