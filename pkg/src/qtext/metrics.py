"""Confusion-matrix accumulation and accuracy / precision / recall / F1.

Binary problems are scored directly on the positive class (label 1);
multiclass problems report macro averages over one-vs-rest reductions.
Zero-denominator cases score 0 and record a flag instead of emitting NaN,
so downstream CSV and JSON stay parseable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass
class ConfusionMatrix:
    """counts[true_label, predicted_label] over C classes."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if (
            self.counts.ndim != 2
            or self.counts.shape[0] != self.counts.shape[1]
            or self.counts.shape[0] < 2
        ):
            raise ValidationError(
                f"confusion matrix must be square with C >= 2, "
                f"got shape {self.counts.shape}"
            )
        if (self.counts < 0).any():
            raise ValidationError("confusion matrix counts must be non-negative")

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def merge(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        """Commutative shard merge."""
        if other.n_classes != self.n_classes:
            raise ValidationError("cannot merge matrices of different sizes")
        return ConfusionMatrix(self.counts + other.counts)


def confusion_from_predictions(
    labels: np.ndarray, predictions: np.ndarray, n_classes: int
) -> ConfusionMatrix:
    labels = np.asarray(labels, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    if labels.shape != predictions.shape or labels.ndim != 1:
        raise ValidationError("labels and predictions must be equal-length vectors")
    if labels.size and (
        labels.min() < 0 or labels.max() >= n_classes
        or predictions.min() < 0 or predictions.max() >= n_classes
    ):
        raise ValidationError(f"labels and predictions must lie in 0..{n_classes - 1}")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (labels, predictions), 1)
    return ConfusionMatrix(counts)


def binary_confusion(tp: int, tn: int, fp: int, fn: int) -> ConfusionMatrix:
    """Two-class matrix from positive-class counters."""
    return ConfusionMatrix(np.array([[tn, fp], [fn, tp]], dtype=np.int64))


@dataclass
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    degenerate_flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "degenerate_flags": list(self.degenerate_flags),
        }


def _ratio(num: float, den: float, flag: str, flags: list[str]) -> float:
    if den == 0:
        flags.append(flag)
        return 0.0
    return num / den


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Score a confusion matrix.

    Binary: precision, recall, F1 of the positive class. Multiclass:
    unweighted mean of the per-class one-vs-rest scores.
    """
    if cm.total == 0:
        raise ValidationError("cannot score an empty confusion matrix")
    flags: list[str] = []
    accuracy = float(np.trace(cm.counts)) / cm.total
    if cm.n_classes == 2:
        tp = float(cm.counts[1, 1])
        fp = float(cm.counts[0, 1])
        fn = float(cm.counts[1, 0])
        precision = _ratio(tp, tp + fp, "precision:no-predicted-positives", flags)
        recall = _ratio(tp, tp + fn, "recall:no-actual-positives", flags)
        f1 = _ratio(
            2.0 * precision * recall, precision + recall, "f1:zero-precision-and-recall",
            flags,
        )
        return MetricsReport(accuracy, precision, recall, f1, flags)
    precisions = []
    recalls = []
    f1s = []
    for c in range(cm.n_classes):
        tp = float(cm.counts[c, c])
        fp = float(cm.counts[:, c].sum()) - tp
        fn = float(cm.counts[c, :].sum()) - tp
        p = _ratio(tp, tp + fp, f"precision:class={c}", flags)
        r = _ratio(tp, tp + fn, f"recall:class={c}", flags)
        f1s.append(_ratio(2.0 * p * r, p + r, f"f1:class={c}", flags))
        precisions.append(p)
        recalls.append(r)
    return MetricsReport(
        accuracy,
        float(np.mean(precisions)),
        float(np.mean(recalls)),
        float(np.mean(f1s)),
        flags,
    )
