"""Result tables and result files in the "mean ± std" percent format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
import pandas as pd

from app.errors import DataError
from app.evaluation.metrics import roc_auc
from app.evaluation.reference import lookup
from app.models.config import METHOD_ORDER
from app.models.metrics import METRIC_NAMES, ConfusionMatrix, FoldResult, MetricsReport
from app.utils.logging import get_logger

if TYPE_CHECKING:
    from app.models.metrics import RocCurve

logger = get_logger("evaluation.report")

COLUMN_TITLES = {"acc": "Acc", "prec": "Prec", "rec": "Rec", "auc": "AUC"}
CURVE_COLUMNS = ("epoch", "train_loss", "val_loss", "train_acc", "val_acc")


def format_mean_std(mean: float, std: float) -> str:
    """Render a fraction pair as percent, e.g. (0.9925, 0.0025) -> "99.25 ± 0.25"."""
    return f"{mean * 100:.2f} ± {std * 100:.2f}"


@dataclass
class ResultsTable:
    """Methods x metrics table with its text and JSON renderings."""

    rows: list[dict[str, Any]] = field(default_factory=list)
    text: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"rows": self.rows}


def _method_rank(method: str) -> int:
    return METHOD_ORDER.index(method) if method in METHOD_ORDER else len(METHOD_ORDER)


def _row(report: MetricsReport, with_published: bool) -> dict[str, Any]:
    manifest = report.manifest
    row: dict[str, Any] = {
        "method": report.method,
        "label": manifest.get("name", report.method),
        "activation": manifest.get("activation"),
        "normalization": manifest.get("normalization"),
        "k": report.k,
    }
    for name in METRIC_NAMES:
        row[name] = {"mean": report.mean[name], "std": report.std[name]}
        row[f"{name}_text"] = format_mean_std(report.mean[name], report.std[name])

    if with_published:
        published = None
        if row["normalization"]:
            published = lookup(report.method, row["activation"], row["normalization"])
        row["published_acc"] = published.formatted("acc") if published else ""
    return row


def aggregate_report(
    reports: list[MetricsReport], with_published: bool = False
) -> ResultsTable:
    """Combine run reports into one table ordered by the declared method order.

    Reports of the same method keep their input order. Duplicated runs give
    duplicated rows.

    Args:
        reports: One report per run.
        with_published: Add the published accuracy for matching runs.

    Returns:
        ResultsTable with rows, plain-text rendering and JSON form.

    Raises:
        DataError: If no reports are given.
    """
    if not reports:
        raise DataError("cannot aggregate an empty list of reports")

    ordered = sorted(reports, key=lambda r: _method_rank(r.method))
    rows = [_row(r, with_published) for r in ordered]

    frame = pd.DataFrame(
        {
            "Method": [r["label"] for r in rows],
            **{title: [r[f"{name}_text"] for r in rows] for name, title in COLUMN_TITLES.items()},
        }
    )
    if with_published:
        frame["Published Acc"] = [r["published_acc"] for r in rows]

    return ResultsTable(rows=rows, text=frame.to_string(index=False))


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    return value


def dump_json(path: Path | str, document: dict[str, Any]) -> Path:
    """Write JSON with sorted keys and non-finite floats as null."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(document), sort_keys=True, indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def write_results_json(path: Path | str, report: MetricsReport) -> Path:
    """Write the run manifest, per-fold metrics and aggregates."""
    return dump_json(path, report.to_dict())


def pooled_roc(report: MetricsReport) -> tuple[RocCurve, float]:
    """ROC over the out-of-fold scores of every fold."""
    scores = np.concatenate([np.asarray(f.scores, dtype=np.float64) for f in report.folds])
    truth = np.concatenate([np.asarray(f.truth, dtype=np.intp) for f in report.folds])
    return roc_auc(scores, truth)


def write_roc_csv(path: Path | str, report: MetricsReport) -> Path:
    """Write threshold, fpr, tpr rows of the pooled ROC curve."""
    curve, _ = pooled_roc(report)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(
        {"threshold": curve.thresholds, "fpr": curve.fpr, "tpr": curve.tpr}
    ).to_csv(path, index=False, float_format="%.10g")
    return path


def mean_learning_curve(report: MetricsReport) -> pd.DataFrame:
    """Per-epoch mean of the fold learning curves; empty for baselines."""
    records = [row for f in report.folds for row in f.learning_curve]
    if not records:
        return pd.DataFrame(columns=list(CURVE_COLUMNS))
    frame = pd.DataFrame.from_records(records, columns=list(CURVE_COLUMNS))
    curve = frame.groupby("epoch", sort=True).mean().reset_index()
    curve["epoch"] = curve["epoch"].astype(int)
    return curve


def write_curves_csv(path: Path | str, report: MetricsReport) -> Path:
    """Write epoch, train_loss, val_loss, train_acc, val_acc rows averaged over folds."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mean_learning_curve(report).to_csv(path, index=False, float_format="%.10g")
    return path


def _fold_from_dict(data: dict[str, Any]) -> FoldResult:
    return FoldResult(
        fold=int(data["fold"]),
        confusion=ConfusionMatrix(**data["confusion"]),
        acc=float(data["acc"]),
        prec=float(data["prec"]),
        rec=float(data["rec"]),
        auc=float(data["auc"]),
        n_test=int(data["n_test"]),
        degenerate=list(data.get("degenerate", [])),
        warnings=list(data.get("warnings", [])),
    )


def load_results(path: Path | str) -> MetricsReport:
    """Read a results.json back into a MetricsReport (without scores or curves).

    Raises:
        DataError: If the file is missing, not JSON or lacks required fields.
    """
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
        aggregate = document["aggregate"]
        return MetricsReport(
            method=document["method"],
            folds=[_fold_from_dict(f) for f in document["folds"]],
            manifest=document.get("manifest", {}),
            mean={name: float(aggregate[name]["mean"]) for name in METRIC_NAMES},
            std={name: float(aggregate[name]["std"]) for name in METRIC_NAMES},
        )
    except FileNotFoundError as e:
        raise DataError(f"Results file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise DataError(f"Invalid JSON in results file {path}: {e}") from e
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"Malformed results file {path}: {e}") from e
