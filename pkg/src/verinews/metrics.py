"""Evaluation: confusion matrix, per-class precision/recall/F1, macro-F1,
accuracy, and the text renderings used by the CLI.

Conventions: a class with an empty prediction column or truth row scores 0
(so macro-F1 stays defined on imbalanced data); grid cells print as
"<count> <pct>%" with two-decimal percentages of the grand total; the grid
footer prints accuracy as a three-decimal percentage; the per-class table
rounds half-up to whole percents.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .corpus import Label

LABEL_ORDER = (Label.FALSE, Label.TRUE, Label.PARTIALLY_FALSE, Label.OTHER)


@dataclass(frozen=True)
class Confusion:
    """cells[i][j] = documents with true label i predicted as label j."""

    cells: np.ndarray  # (4, 4) int64

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.int64)
        if cells.shape != (4, 4):
            raise ValueError(f"confusion cells must be 4x4, got {cells.shape}")
        if np.any(cells < 0):
            raise ValueError("confusion cells must be non-negative")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def total(self) -> int:
        return int(self.cells.sum())

    def row_sum(self, label: Label) -> int:
        return int(self.cells[int(label)].sum())

    def column_sum(self, label: Label) -> int:
        return int(self.cells[:, int(label)].sum())


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    confusion: Confusion
    per_class: tuple[ClassMetrics, ClassMetrics, ClassMetrics, ClassMetrics]
    accuracy: float
    macro_f1: float


def confusion_matrix(y_true: list[Label], y_pred: list[Label]) -> Confusion:
    """Exact counts with both axes in fixed label-code order."""
    if len(y_true) != len(y_pred):
        raise ValueError(f"length mismatch: {len(y_true)} true vs {len(y_pred)} predicted")
    if not y_true:
        raise ValueError("cannot build a confusion matrix from empty inputs")
    cells = np.zeros((4, 4), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        cells[int(t), int(p)] += 1
    return Confusion(cells=cells)


def class_metrics(conf: Confusion, c: Label) -> ClassMetrics:
    """Precision/recall/F1 for one class; zero divisions score 0."""
    hit = float(conf.cells[int(c), int(c)])
    col = conf.column_sum(c)
    row = conf.row_sum(c)
    precision = hit / col if col else 0.0
    recall = hit / row if row else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return ClassMetrics(precision=precision, recall=recall, f1=f1)


def accuracy(conf: Confusion) -> float:
    if conf.total == 0:
        raise ValueError("accuracy undefined on an empty confusion matrix")
    return float(np.trace(conf.cells)) / conf.total


def macro_average(values) -> float:
    """Unweighted mean, the aggregation behind macro-F1."""
    values = list(values)
    return sum(values) / len(values)


def macro_f1(conf: Confusion) -> float:
    """Mean of the four per-class F1 values; zero-support classes count."""
    if conf.total == 0:
        raise ValueError("macro F1 undefined on an empty confusion matrix")
    return macro_average(class_metrics(conf, c).f1 for c in LABEL_ORDER)


def classification_report(conf: Confusion) -> EvalReport:
    per_class = tuple(class_metrics(conf, c) for c in LABEL_ORDER)
    return EvalReport(
        confusion=conf,
        per_class=per_class,
        accuracy=accuracy(conf),
        macro_f1=macro_average(m.f1 for m in per_class),
    )


def pct_int(fraction: float) -> int:
    """Whole-percent rounding, half away from zero (0.585 -> 59)."""
    return int(math.floor(fraction * 100.0 + 0.5))


def render_confusion(conf: Confusion, title: str = "") -> str:
    """Text grid: true labels down, predicted across, cells "count pct%".

    Percentages are of the grand total with two decimals; the footer line
    is "Accuracy=" followed by the three-decimal accuracy percentage.
    """
    if conf.total == 0:
        raise ValueError("cannot render an empty confusion matrix")
    names = [label.display_name for label in LABEL_ORDER]
    cells = [
        [_cell_text(int(conf.cells[i, j]), conf.total) for j in range(4)] for i in range(4)
    ]
    widths = [
        max(len(names[j]), max(len(cells[i][j]) for i in range(4))) for j in range(4)
    ]
    left = max(len(n) for n in names)

    lines = []
    if title:
        lines.append(title)
    lines.append(_pad("", left) + "  " + "  ".join(_pad(n, w) for n, w in zip(names, widths)))
    for i in range(4):
        lines.append(
            _pad(names[i], left)
            + "  "
            + "  ".join(_pad(cells[i][j], widths[j]) for j in range(4))
        )
    lines.append(f"Accuracy={100.0 * accuracy(conf):.3f}")
    return "\n".join(lines) + "\n"


def render_report(report: EvalReport) -> str:
    """Per-class table in whole percents plus the aggregate lines."""
    header = f"{'class':<16}{'precision':>10}{'recall':>8}{'f1':>6}"
    lines = [header]
    for label, m in zip(LABEL_ORDER, report.per_class):
        lines.append(
            f"{label.display_name:<16}"
            f"{pct_int(m.precision):>9}%{pct_int(m.recall):>7}%{pct_int(m.f1):>5}%"
        )
    lines.append("")
    lines.append(f"accuracy: {pct_int(report.accuracy)}%")
    lines.append(f"macro F1: {pct_int(report.macro_f1)}%")
    return "\n".join(lines) + "\n"


def report_to_json(report: EvalReport) -> str:
    """Machine-readable report: confusion cells, full-precision metrics."""
    payload = {
        "labels": [label.display_name for label in LABEL_ORDER],
        "confusion": report.confusion.cells.tolist(),
        "total": report.confusion.total,
        "per_class": {
            label.display_name: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
            }
            for label, m in zip(LABEL_ORDER, report.per_class)
        },
        "accuracy": report.accuracy,
        "macro_f1": report.macro_f1,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> EvalReport:
    """Rebuild an EvalReport from its JSON form (metrics recomputed from
    the confusion cells, which are the ground truth of the format)."""
    payload = json.loads(text)
    cells = np.asarray(payload["confusion"], dtype=np.int64)
    return classification_report(Confusion(cells=cells))


def _cell_text(count: int, total: int) -> str:
    return f"{count} {100.0 * count / total:.2f}%"


def _pad(text: str, width: int) -> str:
    return text.ljust(width)
