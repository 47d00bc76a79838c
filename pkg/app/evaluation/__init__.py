"""Cross-validation, metrics, result tables and plots."""

from app.evaluation.harness import (
    BaselineFoldModel,
    DeepFoldModel,
    FoldModel,
    HarnessConfig,
    Trainer,
    cross_validate,
    fold_seed,
    trainer_for,
)
from app.evaluation.metrics import (
    ClassificationMetrics,
    confusion,
    mann_whitney_auc,
    mean_std,
    metrics,
    roc_auc,
)
from app.evaluation.plots import curves_svg, grid_accuracy_svg, roc_svg
from app.evaluation.report import (
    ResultsTable,
    aggregate_report,
    format_mean_std,
    load_results,
    write_curves_csv,
    write_results_json,
    write_roc_csv,
)

__all__ = [
    "BaselineFoldModel",
    "ClassificationMetrics",
    "DeepFoldModel",
    "FoldModel",
    "HarnessConfig",
    "ResultsTable",
    "Trainer",
    "aggregate_report",
    "confusion",
    "cross_validate",
    "curves_svg",
    "fold_seed",
    "format_mean_std",
    "grid_accuracy_svg",
    "load_results",
    "mann_whitney_auc",
    "mean_std",
    "metrics",
    "roc_auc",
    "roc_svg",
    "trainer_for",
    "write_curves_csv",
    "write_results_json",
    "write_roc_csv",
]
