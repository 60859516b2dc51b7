"""Evaluation metrics with malicious as the positive class."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dataset import parse_label
from .errors import DataError, LengthMismatch, SingleClass


@dataclass(frozen=True)
class Confusion:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total

    @property
    def fpr(self) -> float:
        return self.fp / max(1, self.fp + self.tn)

    @property
    def fnr(self) -> float:
        return self.fn / max(1, self.fn + self.tp)

    def __add__(self, other: "Confusion") -> "Confusion":
        return Confusion(self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn)


def confusion(labels: Sequence[int], predictions: Sequence[int]) -> Confusion:
    y = np.asarray(labels, dtype=np.int64)
    p = np.asarray(predictions, dtype=np.int64)
    if y.shape != p.shape:
        raise LengthMismatch(f"{len(y)} labels vs {len(p)} predictions")
    if y.size == 0:
        raise DataError("confusion of an empty set")
    return Confusion(
        tp=int(((y == 1) & (p == 1)).sum()),
        fp=int(((y == 0) & (p == 1)).sum()),
        tn=int(((y == 0) & (p == 0)).sum()),
        fn=int(((y == 1) & (p == 0)).sum()),
    )


def _check_scored(labels, scores) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(labels, dtype=np.int64)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape:
        raise LengthMismatch(f"{len(y)} labels vs {len(s)} scores")
    n_pos = int((y == 1).sum())
    if n_pos == 0 or n_pos == len(y):
        raise SingleClass("AUC needs both classes present")
    return y, s


def auc(labels: Sequence[int], scores: Sequence[float]) -> float:
    """Mann-Whitney statistic: P(random positive outscores random negative), ties worth 1/2."""
    y, s = _check_scored(labels, scores)
    order = np.argsort(s, kind="mergesort")
    s_sorted = s[order]
    # Average 1-based ranks over tied groups.
    starts = np.flatnonzero(np.r_[True, s_sorted[1:] != s_sorted[:-1]])
    ends = np.r_[starts[1:], len(s)]
    ranks = np.empty(len(s), dtype=np.float64)
    ranks[order] = np.repeat((starts + ends + 1) / 2.0, ends - starts)
    n_pos = int((y == 1).sum())
    n_neg = len(y) - n_pos
    rank_sum = ranks[y == 1].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def roc_curve(labels: Sequence[int], scores: Sequence[float]) -> list[tuple[float, float]]:
    """ROC points for thresholds at each distinct score, highest first, from (0,0) to (1,1)."""
    y, s = _check_scored(labels, scores)
    order = np.argsort(-s, kind="mergesort")
    s_desc = s[order]
    y_desc = y[order]
    last_of_group = np.flatnonzero(np.r_[s_desc[1:] != s_desc[:-1], True])
    tps = np.cumsum(y_desc)[last_of_group]
    fps = (last_of_group + 1) - tps
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    points = [(0.0, 0.0)]
    points += list(zip((fps / n_neg).tolist(), (tps / n_pos).tolist()))
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))
    return points


def trapezoid_area(points: Sequence[tuple[float, float]]) -> float:
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


@dataclass
class EvalReport:
    confusion: Confusion
    auc: Optional[float]
    threshold: float
    roc_points: list = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return self.confusion.accuracy

    @property
    def fpr(self) -> float:
        return self.confusion.fpr

    @property
    def fnr(self) -> float:
        return self.confusion.fnr

    def summary(self) -> dict:
        return {
            "threshold": self.threshold,
            "n": self.confusion.total,
            **asdict(self.confusion),
            "accuracy": self.accuracy,
            "fpr": self.fpr,
            "fnr": self.fnr,
            "auc": self.auc,
        }

    def to_json(self) -> str:
        out = self.summary()
        out["roc_points"] = [list(p) for p in self.roc_points]
        return json.dumps(out, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        summary = self.summary()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(summary))
        writer.writerow(["" if v is None else v for v in summary.values()])
        return buf.getvalue()

    def render(self) -> str:
        c = self.confusion
        auc_text = "n/a" if self.auc is None else f"{self.auc:.4f}"
        return "\n".join(
            [
                f"threshold  {self.threshold}",
                f"rows       {c.total}",
                f"tp {c.tp}  fp {c.fp}  tn {c.tn}  fn {c.fn}",
                f"accuracy   {self.accuracy:.4f}",
                f"fpr        {self.fpr:.4f}",
                f"fnr        {self.fnr:.4f}",
                f"auc        {auc_text}",
            ]
        )


def evaluate_scores(labels: Sequence[int], scores: Sequence[float], threshold: float = 0.5) -> EvalReport:
    """Build an EvalReport from precomputed scores (model output or an external file)."""
    y = np.asarray(labels, dtype=np.int64)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape:
        raise LengthMismatch(f"{len(y)} labels vs {len(s)} scores")
    conf = confusion(y, (s >= threshold).astype(np.int64))
    n_pos = int(y.sum())
    if 0 < n_pos < len(y):
        return EvalReport(conf, auc(y, s), threshold, roc_curve(y, s))
    return EvalReport(conf, None, threshold, [])


def evaluate(model, X, labels: Sequence[int], threshold: float = 0.5) -> EvalReport:
    """Score a featurized test matrix with ``model`` and assemble the report."""
    return evaluate_scores(labels, model.predict_scores(X), threshold)


def load_scores_file(path) -> tuple[list[int], list[float]]:
    """Read ``score,label`` rows (header optional) from an external classifier."""
    labels, scores = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if lineno == 1 and row[0].strip().lower() == "score":
                continue
            if len(row) != 2:
                raise DataError(f"{path}:{lineno}: expected score,label")
            label = parse_label(row[1])
            try:
                score = float(row[0])
            except ValueError:
                score = None
            if label is None or score is None:
                raise DataError(f"{path}:{lineno}: bad row {row!r}")
            labels.append(label)
            scores.append(score)
    if not labels:
        raise DataError(f"{path}: no scores")
    return labels, scores
