"""Standalone SVG plots: ROC curves, learning curves and grouped accuracy bars.

Every line series is drawn as exactly one ``<polyline>``.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from collections.abc import Sequence

    import pandas as pd

    from app.models.metrics import RocCurve

SVG_NS = "http://www.w3.org/2000/svg"
WIDTH = 480
HEIGHT = 360
MARGIN = 48
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")

ET.register_namespace("", SVG_NS)


def _fmt(value: float) -> str:
    return f"{value:.2f}"


@dataclass
class LinePlot:
    """A single-axes line chart over fixed data ranges."""

    title: str
    x_label: str
    y_label: str
    x_range: tuple[float, float] = (0.0, 1.0)
    y_range: tuple[float, float] = (0.0, 1.0)
    series: list[tuple[str, list[tuple[float, float]], dict[str, str]]] = field(
        default_factory=list
    )

    def _px(self, x: float, y: float) -> tuple[float, float]:
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        sx = (x - x0) / (x1 - x0) if x1 > x0 else 0.0
        sy = (y - y0) / (y1 - y0) if y1 > y0 else 0.0
        return (
            MARGIN + sx * (WIDTH - 2 * MARGIN),
            HEIGHT - MARGIN - sy * (HEIGHT - 2 * MARGIN),
        )

    def add_series(
        self, name: str, points: Sequence[tuple[float, float]], dashed: bool = False
    ) -> None:
        """Add one series; points with a non-finite coordinate are dropped."""
        kept = [(float(x), float(y)) for x, y in points if math.isfinite(x) and math.isfinite(y)]
        style = {"stroke": PALETTE[len(self.series) % len(PALETTE)]}
        if dashed:
            style["stroke-dasharray"] = "4 3"
        self.series.append((name, kept, style))

    def to_element(self) -> ET.Element:
        svg = _canvas(self.title)
        _axes(svg, self.x_label, self.y_label, self.x_range, self.y_range)

        for i, (name, points, style) in enumerate(self.series):
            coords = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in (self._px(*p) for p in points))
            ET.SubElement(
                svg,
                f"{{{SVG_NS}}}polyline",
                {"points": coords, "fill": "none", "stroke-width": "2", "class": "series", **style},
            ).set("data-series", name)
            legend_y = MARGIN + 14 * i
            ET.SubElement(
                svg,
                f"{{{SVG_NS}}}text",
                {"x": str(WIDTH - MARGIN - 120), "y": str(legend_y), "fill": style["stroke"],
                 "font-size": "11"},
            ).text = name
        return svg

    def write(self, path: Path | str) -> Path:
        return _write(path, self.to_element())


def _canvas(title: str) -> ET.Element:
    svg = ET.Element(
        f"{{{SVG_NS}}}svg",
        {"width": str(WIDTH), "height": str(HEIGHT), "viewBox": f"0 0 {WIDTH} {HEIGHT}"},
    )
    ET.SubElement(svg, f"{{{SVG_NS}}}title").text = title
    ET.SubElement(
        svg,
        f"{{{SVG_NS}}}text",
        {"x": str(WIDTH // 2), "y": "20", "text-anchor": "middle", "font-size": "14"},
    ).text = title
    return svg


def _axes(
    svg: ET.Element,
    x_label: str,
    y_label: str,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
) -> None:
    bottom = HEIGHT - MARGIN
    line = {"stroke": "#000", "stroke-width": "1"}
    ET.SubElement(
        svg, f"{{{SVG_NS}}}line",
        {"x1": str(MARGIN), "y1": str(bottom), "x2": str(WIDTH - MARGIN), "y2": str(bottom),
         **line},
    )  # fmt: skip
    ET.SubElement(
        svg, f"{{{SVG_NS}}}line",
        {"x1": str(MARGIN), "y1": str(MARGIN), "x2": str(MARGIN), "y2": str(bottom), **line},
    )  # fmt: skip

    small = {"font-size": "10"}
    ET.SubElement(
        svg, f"{{{SVG_NS}}}text", {"x": str(MARGIN), "y": str(bottom + 14), **small}
    ).text = _fmt(x_range[0])
    ET.SubElement(
        svg, f"{{{SVG_NS}}}text",
        {"x": str(WIDTH - MARGIN), "y": str(bottom + 14), "text-anchor": "end", **small},
    ).text = _fmt(x_range[1])  # fmt: skip
    ET.SubElement(
        svg, f"{{{SVG_NS}}}text",
        {"x": str(MARGIN - 4), "y": str(bottom), "text-anchor": "end", **small},
    ).text = _fmt(y_range[0])  # fmt: skip
    ET.SubElement(
        svg, f"{{{SVG_NS}}}text",
        {"x": str(MARGIN - 4), "y": str(MARGIN + 4), "text-anchor": "end", **small},
    ).text = _fmt(y_range[1])  # fmt: skip
    ET.SubElement(
        svg, f"{{{SVG_NS}}}text",
        {"x": str(WIDTH // 2), "y": str(HEIGHT - 10), "text-anchor": "middle", "font-size": "12"},
    ).text = x_label
    ET.SubElement(
        svg, f"{{{SVG_NS}}}text",
        {"x": "14", "y": str(HEIGHT // 2), "font-size": "12",
         "transform": f"rotate(-90 14 {HEIGHT // 2})", "text-anchor": "middle"},
    ).text = y_label  # fmt: skip


def _write(path: Path | str, svg: ET.Element) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ET.ElementTree(svg).write(path, encoding="utf-8", xml_declaration=True)
    return path


def roc_svg(path: Path | str, curve: RocCurve, auc: float, title: str) -> Path:
    """ROC curve with the chance diagonal."""
    plot = LinePlot(title=f"{title} (AUC {auc:.4f})", x_label="False positive rate",
                    y_label="True positive rate")  # fmt: skip
    plot.add_series("ROC", curve.points)
    plot.add_series("chance", [(0.0, 0.0), (1.0, 1.0)], dashed=True)
    return plot.write(path)


def curves_svg(path: Path | str, curve: pd.DataFrame, title: str) -> Path:
    """Mean learning curves: one polyline per loss or accuracy series with data."""
    columns = [c for c in ("train_loss", "val_loss", "train_acc", "val_acc") if c in curve]
    present = [c for c in columns if curve[c].notna().any()]
    epochs = [float(e) for e in curve["epoch"]] if len(curve) else [0.0]
    top = max([1.0, *(float(curve[c].max()) for c in present)])

    plot = LinePlot(
        title=title,
        x_label="Epoch",
        y_label="Loss / accuracy",
        x_range=(min(epochs), max(max(epochs), min(epochs) + 1.0)),
        y_range=(0.0, top),
    )
    for column in present:
        plot.add_series(
            column,
            list(zip(epochs, (float(v) for v in curve[column]), strict=True)),
            dashed=column.startswith("val"),
        )
    return plot.write(path)


def grid_accuracy_svg(path: Path | str, rows: list[dict[str, Any]], title: str) -> Path:
    """Grouped bar chart of mean accuracy: one group per method, one bar per setting.

    Args:
        path: Output file.
        rows: Result table rows with ``method``, ``label`` and ``acc.mean``.
        title: Chart title.
    """
    methods = list(dict.fromkeys(r["method"] for r in rows))
    settings = list(dict.fromkeys(r["label"].removeprefix(f"{r['method']}_") for r in rows))

    svg = _canvas(title)
    _axes(svg, "Method", "Accuracy", (0.0, float(len(methods))), (0.0, 1.0))
    plot_w = WIDTH - 2 * MARGIN
    plot_h = HEIGHT - 2 * MARGIN
    group_w = plot_w / max(len(methods), 1)
    bar_w = group_w * 0.8 / max(len(settings), 1)

    for row in rows:
        g = methods.index(row["method"])
        s = settings.index(row["label"].removeprefix(f"{row['method']}_"))
        height = max(0.0, min(1.0, float(row["acc"]["mean"]))) * plot_h
        x = MARGIN + g * group_w + group_w * 0.1 + s * bar_w
        ET.SubElement(
            svg,
            f"{{{SVG_NS}}}rect",
            {
                "x": _fmt(x),
                "y": _fmt(HEIGHT - MARGIN - height),
                "width": _fmt(bar_w),
                "height": _fmt(height),
                "fill": PALETTE[s % len(PALETTE)],
                "class": "bar",
            },
        ).set("data-label", row["label"])

    for g, method in enumerate(methods):
        ET.SubElement(
            svg,
            f"{{{SVG_NS}}}text",
            {"x": _fmt(MARGIN + (g + 0.5) * group_w), "y": str(HEIGHT - MARGIN + 26),
             "text-anchor": "middle", "font-size": "9"},
        ).text = method  # fmt: skip
    for s, setting in enumerate(settings):
        ET.SubElement(
            svg,
            f"{{{SVG_NS}}}text",
            {"x": str(WIDTH - MARGIN - 120), "y": str(MARGIN + 14 * s),
             "fill": PALETTE[s % len(PALETTE)], "font-size": "11"},
        ).text = setting  # fmt: skip
    return _write(path, svg)
