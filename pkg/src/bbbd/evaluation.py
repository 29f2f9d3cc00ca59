"""Detection and order-recovery metrics.

Detection treats "occluded" as the positive class and counts objects.
Order recovery scores unordered pairs that the ground truth relates.
Dataset totals are micro-averaged: counts are summed over images first,
ratios are taken last.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, fields
from typing import Iterable, Mapping, NamedTuple, Optional

import numpy as np

from .errors import DimensionMismatch, LengthMismatch

__all__ = [
    "GroundTruth",
    "OrderScore",
    "EvalReport",
    "order_accuracy",
    "detection_report",
    "evaluate",
    "aggregate",
    "format_table",
    "reports_to_csv",
]


@dataclass
class GroundTruth:
    order: np.ndarray
    occluded: np.ndarray
    occlusion_ratio: Optional[np.ndarray] = None

    def __post_init__(self):
        self.order = np.asarray(self.order, dtype=np.int8)
        self.occluded = np.asarray(self.occluded, dtype=bool)
        n = self.order.shape[0]
        if self.order.shape != (n, n) or self.occluded.shape != (n,):
            raise DimensionMismatch("ground-truth order and labels disagree in size")
        if self.occlusion_ratio is not None:
            self.occlusion_ratio = np.asarray(self.occlusion_ratio, dtype=float)

    @classmethod
    def from_order(cls, order, occlusion_ratio=None) -> "GroundTruth":
        """Derive labels from ratios when present, else from being an occludee."""
        order = np.asarray(order, dtype=np.int8)
        if occlusion_ratio is not None:
            occluded = np.asarray(occlusion_ratio, dtype=float) > 0
        else:
            occluded = (order == -1).any(axis=1) if order.size else np.zeros(0, bool)
        return cls(order, occluded, occlusion_ratio)


class OrderScore(NamedTuple):
    accuracy: Optional[float]
    matches: int
    pairs: int


@dataclass
class EvalReport:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    order_matches: int = 0
    related_pairs: int = 0

    @property
    def total_objects(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> Optional[float]:
        total = self.total_objects
        return (self.tp + self.tn) / total if total else None

    @property
    def precision(self) -> Optional[float]:
        d = self.tp + self.fp
        return self.tp / d if d else None

    @property
    def recall(self) -> Optional[float]:
        d = self.tp + self.fn
        return self.tp / d if d else None

    @property
    def order_accuracy(self) -> Optional[float]:
        return self.order_matches / self.related_pairs if self.related_pairs else None

    def percentages(self) -> dict:
        """Confusion counts as percentages of all objects."""
        total = self.total_objects
        if not total:
            return {k: None for k in ("tp", "fp", "tn", "fn")}
        return {k: 100.0 * getattr(self, k) / total for k in ("tp", "fp", "tn", "fn")}

    def __add__(self, other: "EvalReport") -> "EvalReport":
        return EvalReport(
            **{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)}
        )

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "total_objects": self.total_objects,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "confusion_percent": self.percentages(),
            "order_matches": self.order_matches,
            "related_pairs": self.related_pairs,
            "order_accuracy": self.order_accuracy,
        }


def order_accuracy(pred, gt, strict: bool = False) -> OrderScore:
    """Fraction of ground-truth related pairs whose direction is recovered.

    Only pairs ``i < j`` with ``gt[i, j] != 0`` are scored by default; with
    ``strict`` every pair counts, so predicting a relation the ground truth
    lacks is a miss. An empty denominator gives ``accuracy=None``.
    """
    pred = np.asarray(pred)
    gt = np.asarray(gt)
    if pred.shape != gt.shape or pred.ndim != 2 or pred.shape[0] != pred.shape[1]:
        raise DimensionMismatch(f"order matrices differ in shape: {pred.shape} vs {gt.shape}")
    iu = np.triu_indices(gt.shape[0], k=1)
    p, g = pred[iu], gt[iu]
    if not strict:
        keep = g != 0
        p, g = p[keep], g[keep]
    pairs = int(g.size)
    matches = int(np.count_nonzero(p == g))
    return OrderScore(matches / pairs if pairs else None, matches, pairs)


def detection_report(pred_labels, gt) -> EvalReport:
    """Confusion counts for per-object occlusion labels.

    ``gt`` is a :class:`GroundTruth` or a plain boolean label vector.
    """
    truth = gt.occluded if isinstance(gt, GroundTruth) else np.asarray(gt, dtype=bool)
    pred = np.asarray(pred_labels, dtype=bool)
    if pred.shape != truth.shape:
        raise LengthMismatch(f"{pred.size} predicted labels for {truth.size} objects")
    return EvalReport(
        tp=int(np.count_nonzero(pred & truth)),
        fp=int(np.count_nonzero(pred & ~truth)),
        tn=int(np.count_nonzero(~pred & ~truth)),
        fn=int(np.count_nonzero(~pred & truth)),
    )


def evaluate(pred_order, gt: GroundTruth, strict: bool = False) -> EvalReport:
    """Detection counts from the row rule plus order matches for one image."""
    pred_order = np.asarray(pred_order)
    labels = (pred_order == -1).any(axis=1) if pred_order.size else np.zeros(0, bool)
    report = detection_report(labels, gt)
    score = order_accuracy(pred_order, gt.order, strict=strict)
    report.order_matches = score.matches
    report.related_pairs = score.pairs
    return report


def aggregate(reports: Iterable[EvalReport]) -> EvalReport:
    total = EvalReport()
    for r in reports:
        total = total + r
    return total


def _pct(v):
    return "n/a" if v is None else f"{100.0 * v:.2f}%"


def format_table(reports: Mapping[str, EvalReport]) -> str:
    """Plain-text comparison laid out as detection, confusion and order sections."""
    names = list(reports)
    width = max([10] + [len(n) + 2 for n in names])

    def row(label, values):
        return f"{label:<12}" + "".join(f"{v:>{width}}" for v in values)

    lines = ["Occlusion detection", row("", names)]
    for metric in ("accuracy", "precision", "recall"):
        lines.append(row(metric.capitalize(), [_pct(getattr(reports[n], metric)) for n in names]))
    lines += ["", "Confusion (% of objects)", row("", ["TP", "FP", "TN", "FN"])]
    for n in names:
        pc = reports[n].percentages()
        lines.append(
            row(n, ["n/a" if pc[k] is None else f"{pc[k]:.1f}%" for k in ("tp", "fp", "tn", "fn")])
        )
    lines += ["", "Order recovery", row("", names)]
    lines.append(row("Accuracy", [_pct(reports[n].order_accuracy) for n in names]))
    return "\n".join(lines) + "\n"


CSV_COLUMNS = [
    "method", "tp", "fp", "tn", "fn", "total_objects", "accuracy", "precision",
    "recall", "order_matches", "related_pairs", "order_accuracy",
]


def reports_to_csv(reports: Mapping[str, EvalReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for name, r in reports.items():
        d = r.to_dict()
        writer.writerow([name] + ["" if d[c] is None else d[c] for c in CSV_COLUMNS[1:]])
    return buf.getvalue()
