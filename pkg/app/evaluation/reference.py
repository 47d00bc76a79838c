"""Published five-fold results (percent mean, std) for side-by-side reports.

Keys are (method, activation, normalization); baselines have no activation.
Metric order is acc, prec, rec, auc.
"""

from __future__ import annotations

from dataclasses import dataclass

from app.models.metrics import METRIC_NAMES

Cell = tuple[float, float]


@dataclass(frozen=True)
class PublishedRow:
    """One published result row in percent."""

    method: str
    activation: str | None
    normalization: str
    cells: dict[str, Cell]

    def formatted(self, metric: str) -> str:
        cell = self.cells.get(metric)
        return "" if cell is None else f"{cell[0]:.2f} ± {cell[1]:.2f}"


_SHALLOW: dict[tuple[str, str], tuple[Cell, Cell, Cell, Cell]] = {
    ("knn", "raw"): ((57.03, 2.21), (52.12, 2.66), (99.80, 0.38), (59.58, 0.56)),
    ("knn", "zscore"): ((55.10, 1.77), (49.32, 1.42), (99.80, 0.39), (60.13, 1.28)),
    ("dtree", "raw"): ((64.19, 3.08), (62.49, 5.15), (59.52, 5.40), (63.94, 3.12)),
    ("dtree", "zscore"): ((64.71, 4.12), (59.28, 5.00), (61.16, 5.14), (64.31, 4.21)),
    ("svm_rbf", "raw"): ((54.14, 3.97), (20.77, 25.50), (32.57, 39.96), (54.10, 5.16)),
    ("svm_rbf", "zscore"): ((62.09, 2.75), (54.72, 2.92), (77.81, 2.01), (63.89, 2.42)),
    ("gnb", "raw"): ((62.62, 2.52), (56.08, 2.76), (93.21, 4.60), (64.35, 2.30)),
    ("gnb", "zscore"): ((59.12, 3.26), (51.78, 2.38), (94.81, 2.61), (63.15, 2.97)),
    ("bagging", "raw"): ((77.37, 3.23), (81.80, 2.56), (66.93, 6.13), (76.91, 2.96)),
    ("bagging", "zscore"): ((81.22, 1.74), (82.90, 3.76), (72.02, 1.95), (80.21, 1.65)),
    ("rforest", "raw"): ((75.19, 2.19), (83.60, 4.22), (59.00, 3.62), (74.20, 1.43)),
    ("rforest", "zscore"): ((78.77, 1.55), (81.23, 2.31), (66.80, 2.94), (77.44, 1.74)),
    ("etrees", "raw"): ((76.24, 1.84), (80.64, 3.37), (64.96, 2.10), (75.57, 1.52)),
    ("etrees", "zscore"): ((76.94, 1.81), (76.29, 2.27), (68.35, 3.90), (75.96, 2.05)),
}

_DEEP: dict[tuple[str, str, str], tuple[Cell, Cell, Cell, Cell]] = {
    ("CNN-1", "relu", "zscore"): ((93.27, 1.31), (90.15, 4.60), (93.18, 5.18), (97.80, 0.35)),
    ("CNN-2", "relu", "zscore"): ((84.80, 11.7), (65.18, 32.79), (78.63, 39.34), (88.80, 19.40)),
    ("CNN-3", "relu", "zscore"): ((93.97, 2.33), (89.16, 5.34), (96.59, 2.87), (97.74, 0.85)),
    ("LSTM-1", "relu", "zscore"): ((79.03, 3.92), (69.71, 6.01), (82.95, 4.711), (87.76, 3.26)),
    ("LSTM-2", "relu", "zscore"): ((71.79, 8.72), (50.58, 26.85), (70.45, 35.26), (77.31, 14.52)),
    ("CNN-LSTM-1", "relu", "zscore"): ((93.71, 0.71), (89.09, 2.505), (95.45, 1.901), (96.37, 0.62)),
    ("CNN-LSTM-2", "relu", "zscore"): ((94.76, 1.23), (90.79, 1.914), (96.14, 1.541), (97.29, 0.50)),
    ("CNN-1", "relu", "zscore_l2"): ((92.66, 1.39), (92.01, 2.57), (88.86, 6.15), (97.40, 0.60)),
    ("CNN-2", "relu", "zscore_l2"): ((84.80, 11.7), (89.25, 2.55), (85.84, 9.18), (88.63, 8.71)),
    ("CNN-3", "relu", "zscore_l2"): ((93.18, 1.25), (89.33, 5.17), (94.09, 4.21), (98.04, 0.23)),
    ("LSTM-1", "relu", "zscore_l2"): ((71.79, 7.83), (67.12, 10.3), (57.72, 28.8), (73.71, 11.48)),
    ("LSTM-2", "relu", "zscore_l2"): ((71.0, 12.16), (69.48, 14.5), (68.18, 31.3), (76.37, 12.46)),
    ("CNN-LSTM-1", "relu", "zscore_l2"): ((98.07, 1.47), (96.01, 3.91), (99.31, 0.55), (99.88, 0.11)),
    ("CNN-LSTM-2", "relu", "zscore_l2"): ((99.25, 0.25), (98.33, 3.33), (98.86, 1.24), (99.73, 0.35)),
    ("CNN-1", "leaky_relu", "zscore"): ((70.83, 8.76), (58.12, 8.23), (98.86, 1.24), (80.95, 8.72)),
    ("CNN-2", "leaky_relu", "zscore"): ((38.42, 0.00), (38.42, 0.00), (100.00, 0.00), (50.00, 0.00)),
    ("CNN-3", "leaky_relu", "zscore"): ((56.85, 4.17), (47.24, 2.57), (99.54, 0.55), (67.19, 5.60)),
    ("LSTM-1", "leaky_relu", "zscore"): ((83.32, 2.55), (73.64, 3.41), (88.63, 6.66), (91.03, 2.02)),
    ("LSTM-2", "leaky_relu", "zscore"): ((79.91, 9.00), (72.12, 11.82), (85.68, 5.90), (86.90, 8.10)),
    ("CNN-LSTM-1", "leaky_relu", "zscore"): (
        (74.06, 19.9), (65.83, 27.45), (58.40, 32.91), (78.32, 20.99)
    ),
    ("CNN-LSTM-2", "leaky_relu", "zscore"): (
        (79.04, 12.2), (71.51, 25.93), (58.40, 36.37), (85.79, 16.62)
    ),
    ("CNN-1", "leaky_relu", "zscore_l2"): ((64.10, 6.68), (52.17, 4.72), (99.31, 0.90), (86.73, 9.86)),
    ("CNN-2", "leaky_relu", "zscore_l2"): ((40.00, 1.76), (39.03, 0.67), (99.77, 0.45), (52.21, 3.22)),
    ("CNN-3", "leaky_relu", "zscore_l2"): ((58.07, 3.77), (47.93, 2.24), (100.00, 0.00), (82.73, 9.98)),
    ("LSTM-1", "leaky_relu", "zscore_l2"): (
        (72.31, 8.37), (56.03, 29.3), (51.59, 29.76), (74.52, 12.28)
    ),
    ("LSTM-2", "leaky_relu", "zscore_l2"): ((76.68, 6.51), (70.79, 9.95), (76.82, 23.80), (80.30, 9.38)),
    ("CNN-LSTM-1", "leaky_relu", "zscore_l2"): (
        (94.76, 5.94), (90.95, 10.6), (98.86, 1.24), (99.73, 0.21)
    ),
    ("CNN-LSTM-2", "leaky_relu", "zscore_l2"): (
        (97.73, 1.39), (96.35, 3.55), (97.95, 1.32), (99.71, 0.15)
    ),
    ("CNN-1", "selu", "zscore"): ((61.65, 4.89), (50.49, 3.98), (95.90, 4.22), (69.50, 4.06)),
    ("CNN-2", "selu", "zscore"): ((57.90, 2.48), (32.43, 19.4), (59.77, 46.99), (56.51, 11.79)),
    ("CNN-3", "selu", "zscore"): ((62.09, 4.43), (50.71, 3.11), (93.18, 11.94), (69.17, 3.67)),
    ("LSTM-1", "selu", "zscore"): ((74.84, 5.05), (64.48, 5.57), (77.50, 9.15), (82.90, 5.55)),
    ("LSTM-2", "selu", "zscore"): ((83.58, 0.81), (74.99, 1.81), (86.13, 3.16), (91.06, 0.52)),
    ("CNN-LSTM-1", "selu", "zscore"): ((59.73, 1.47), (41.14, 6.92), (8.40, 3.18), (50.95, 2.38)),
    ("CNN-LSTM-2", "selu", "zscore"): ((59.65, 3.02), (43.78, 8.60), (10.90, 3.26), (61.16, 5.17)),
    ("CNN-1", "selu", "zscore_l2"): ((65.67, 5.95), (53.71, 5.05), (94.31, 6.14), (75.12, 5.90)),
    ("CNN-2", "selu", "zscore_l2"): ((58.42, 5.43), (38.38, 19.4), (51.36, 44.52), (58.17, 8.82)),
    ("CNN-3", "selu", "zscore_l2"): ((66.46, 4.20), (54.76, 4.37), (88.18, 12.48), (76.09, 4.23)),
    ("LSTM-1", "selu", "zscore_l2"): ((70.13, 8.80), (57.07, 16.6), (58.86, 29.15), (72.11, 13.72)),
    ("LSTM-2", "selu", "zscore_l2"): ((79.65, 6.27), (72.75, 10.1), (79.31, 8.36), (86.43, 5.56)),
    ("CNN-LSTM-1", "selu", "zscore_l2"): ((58.42, 3.39), (48.12, 2.10), (99.73, 0.45), (89.44, 1.57)),
    ("CNN-LSTM-2", "selu", "zscore_l2"): (
        (57.64, 1.68), (47.59, 1.00), (100.00, 0.00), (87.08, 3.84)
    ),
}


def _row(method: str, activation: str | None, normalization: str, cells: tuple[Cell, ...]) -> PublishedRow:
    return PublishedRow(method, activation, normalization, dict(zip(METRIC_NAMES, cells, strict=True)))


PUBLISHED: tuple[PublishedRow, ...] = tuple(
    [_row(m, None, n, cells) for (m, n), cells in _SHALLOW.items()]
    + [_row(m, a, n, cells) for (m, a, n), cells in _DEEP.items()]
)


def lookup(method: str, activation: str | None, normalization: str) -> PublishedRow | None:
    """Published row for a run, ignoring activation for baselines."""
    for row in PUBLISHED:
        if row.method != method or row.normalization != normalization:
            continue
        if row.activation is None or row.activation == activation:
            return row
    return None
