"""Confidence ranking and Precision@K under query or human ground truth.

Rankings are per predicted class: segments compete within the class the
model asserted, ordered by descending confidence with ties broken by
segment id. A classifier's curve is the unweighted mean over its classes;
the combined curve weights classifiers by their class counts.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cnn import CnnModel, forward
from .datasets import DatasetId
from .errors import (
    EmptyTestSet,
    GridMismatch,
    MalformedRow,
    MissingFile,
    MissingGroundTruth,
)
from .features import FeaturePatch

PREDICTIONS_HEADER = ["segment_id", "classifier", "predicted_class", "confidence"]
CURVE_HEADER = ["k", "precision", "gt_mode", "classifier"]
QUERY_GT_HEADER = ["segment_id", "query_label"]

VERDICT_CORRECT = "Correct"
VERDICT_INCORRECT = "Incorrect"


class GtMode(str, Enum):
    QUERY = "query"
    HUMAN = "human"


@dataclass(frozen=True)
class PredictionRow:
    """One ranked unit: a segment with its asserted class and confidence."""
    segment_id: str
    classifier: DatasetId
    predicted_class: str
    confidence: float


@dataclass(frozen=True)
class PrecisionCurve:
    points: tuple[tuple[int, float], ...]  # (k, precision), k strictly increasing
    gt_mode: GtMode
    classifier: str = ""

    @property
    def ks(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.points)


def rank_segments(predictions: Sequence, class_label: str, k: int) -> list[str]:
    """Top-k segment ids predicted as class_label, by descending confidence.

    Ties break on ascending segment_id; fewer than k are returned when the
    class is scarce. Works on any objects carrying segment_id,
    predicted_class and confidence.
    """
    matching = [p for p in predictions if p.predicted_class == class_label]
    matching.sort(key=lambda p: (-p.confidence, p.segment_id))
    return [p.segment_id for p in matching[:k]]


def precision_at_k(
    ranked: Sequence[str],
    gt: Mapping[str, str],
    class_label: str,
    gt_mode: GtMode,
) -> float:
    """Fraction of ranked segments whose ground truth confirms the class.

    Query mode compares the query label against class_label; human mode
    counts aggregated "Correct" verdicts. An empty ranking scores 0.
    """
    if not ranked:
        return 0.0
    hits = 0
    for segment_id in ranked:
        if segment_id not in gt:
            raise MissingGroundTruth(segment_id)
        if gt_mode is GtMode.QUERY:
            hits += gt[segment_id] == class_label
        else:
            hits += gt[segment_id] == VERDICT_CORRECT
    return hits / len(ranked)


def class_curve(predictions: Sequence, gt: Mapping[str, str], class_label: str,
                ks: Sequence[int], gt_mode: GtMode) -> PrecisionCurve:
    ranked_max = rank_segments(predictions, class_label, max(ks))
    points = tuple(
        (k, precision_at_k(ranked_max[:k], gt, class_label, gt_mode)) for k in ks
    )
    return PrecisionCurve(points=points, gt_mode=gt_mode, classifier=class_label)


def classifier_curve(predictions: Sequence, gt: Mapping[str, str],
                     classes: Sequence[str], ks: Sequence[int], gt_mode: GtMode,
                     classifier: str = "") -> PrecisionCurve:
    """Mean of per-class curves; classes with no ranked segments are skipped."""
    curves = []
    for label in classes:
        if any(p.predicted_class == label for p in predictions):
            curves.append(class_curve(predictions, gt, label, ks, gt_mode))
    if not curves:
        points = tuple((k, 0.0) for k in ks)
        return PrecisionCurve(points=points, gt_mode=gt_mode, classifier=classifier)
    mean = np.mean([[p for _, p in c.points] for c in curves], axis=0)
    points = tuple((k, float(v)) for k, v in zip(ks, mean))
    return PrecisionCurve(points=points, gt_mode=gt_mode, classifier=classifier)


def weighted_average_curve(curves: Sequence[PrecisionCurve],
                           weights: Sequence[float]) -> PrecisionCurve:
    """Pointwise weighted mean of per-classifier curves sharing one k grid."""
    if len(curves) != len(weights) or not curves:
        raise GridMismatch("need one weight per curve")
    grid = curves[0].ks
    for c in curves[1:]:
        if c.ks != grid:
            raise GridMismatch(f"k grids differ: {grid} vs {c.ks}")
    total = float(sum(weights))
    values = np.zeros(len(grid))
    for curve, w in zip(curves, weights):
        values += (w / total) * np.array([p for _, p in curve.points])
    points = tuple((k, float(v)) for k, v in zip(grid, values))
    return PrecisionCurve(points=points, gt_mode=curves[0].gt_mode,
                          classifier="weighted_average")


def class_count_weights(class_counts: Sequence[int]) -> list[float]:
    total = sum(class_counts)
    return [c / total for c in class_counts]


def corpus_precision(predictions: Sequence[PredictionRow],
                     query_gt: Mapping[str, str]) -> dict[DatasetId, float]:
    """Per-classifier fraction of ALL segments matching their query label."""
    hits: dict[DatasetId, int] = {}
    totals: dict[DatasetId, int] = {}
    for p in predictions:
        if p.segment_id not in query_gt:
            raise MissingGroundTruth(p.segment_id)
        totals[p.classifier] = totals.get(p.classifier, 0) + 1
        if p.predicted_class == query_gt[p.segment_id]:
            hits[p.classifier] = hits.get(p.classifier, 0) + 1
    return {ds: hits.get(ds, 0) / n for ds, n in totals.items()}


@dataclass
class LabeledClip:
    clip_id: str
    label: str
    patches: list[FeaturePatch]


@dataclass
class AccuracyReport:
    patch_level: float
    clip_level: float


def measure_accuracy(model: CnnModel, test_clips: Sequence[LabeledClip],
                  batch_size: int = 256) -> AccuracyReport:
    """Patch-level accuracy, and clip-level via argmax of mean patch posteriors."""
    clips = [c for c in test_clips if c.patches]
    if not clips:
        raise EmptyTestSet("no test clips with patches")
    labels = model.vocabulary.labels
    x = np.stack([p.values for c in clips for p in c.patches])
    y_patch = np.array([labels.index(c.label) for c in clips for p in c.patches])

    probs = np.vstack([
        forward(model, x[lo:lo + batch_size], mode="infer")
        for lo in range(0, len(x), batch_size)
    ])
    patch_level = float((probs.argmax(axis=1) == y_patch).mean())

    clip_hits, cursor = 0, 0
    for clip in clips:
        n = len(clip.patches)
        mean_probs = probs[cursor:cursor + n].mean(axis=0)
        clip_hits += int(mean_probs.argmax()) == labels.index(clip.label)
        cursor += n
    return AccuracyReport(patch_level=patch_level, clip_level=clip_hits / len(clips))


# -- CSV artifacts -------------------------------------------------------------

def write_predictions_csv(rows: Iterable[PredictionRow], path: str | Path,
                          append: bool = False, comment: str | None = None) -> None:
    path = Path(path)
    fresh = not (append and path.exists())
    with open(path, "a" if append else "w", newline="", encoding="utf-8") as fh:
        if fresh and comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(PREDICTIONS_HEADER)
        for r in rows:
            writer.writerow([r.segment_id, r.classifier.value, r.predicted_class,
                             f"{r.confidence:.9f}"])


def read_predictions_csv(path: str | Path) -> list[PredictionRow]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        lines = (line for line in fh if not line.startswith("#"))
        reader = csv.reader(lines)
        header = next(reader, None)
        if header != PREDICTIONS_HEADER:
            raise MalformedRow(1, f"header must be {','.join(PREDICTIONS_HEADER)}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise MalformedRow(line_no, f"expected 4 fields, got {len(row)}")
            try:
                rows.append(PredictionRow(row[0], DatasetId(row[1]), row[2], float(row[3])))
            except ValueError:
                raise MalformedRow(line_no, "bad classifier or confidence") from None
    return rows


def write_query_gt_csv(gt: Mapping[str, str], path: str | Path,
                       comment: str | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(QUERY_GT_HEADER)
        for segment_id in sorted(gt):
            writer.writerow([segment_id, gt[segment_id]])


def read_query_gt_csv(path: str | Path) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    gt: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        lines = (line for line in fh if not line.startswith("#"))
        reader = csv.reader(lines)
        header = next(reader, None)
        if header != QUERY_GT_HEADER:
            raise MalformedRow(1, f"header must be {','.join(QUERY_GT_HEADER)}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise MalformedRow(line_no, f"expected 2 fields, got {len(row)}")
            gt[row[0]] = row[1]
    return gt


def write_curve_csv(curves: Sequence[PrecisionCurve], path: str | Path,
                    comment: str | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(CURVE_HEADER)
        for curve in curves:
            for k, precision in curve.points:
                writer.writerow([k, f"{precision:.9f}", curve.gt_mode.value,
                                 curve.classifier])
