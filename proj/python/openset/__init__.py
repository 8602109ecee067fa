"""Open-set recognition from per-class generative scorers on classifier activations."""

from ._core import (
    DataError,
    Dataset,
    ModelBank,
    ScoreRecord,
    ScorerConfig,
    binary_auc,
    classify_open_set,
    cross_validate_threshold,
    evaluate,
    fit_bank,
    grid_search_threshold,
    load_bank,
    open_set_f1,
    read_dataset,
    read_scores,
    write_dataset,
    write_scores,
)

__all__ = [
    "DataError",
    "Dataset",
    "ModelBank",
    "ScoreRecord",
    "ScorerConfig",
    "binary_auc",
    "classify_open_set",
    "cross_validate_threshold",
    "evaluate",
    "fit_bank",
    "grid_search_threshold",
    "load_bank",
    "open_set_f1",
    "read_dataset",
    "read_scores",
    "write_dataset",
    "write_scores",
]
