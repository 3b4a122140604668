"""Evaluation metrics: top-k category accuracy, top-k attribute recall, and
normalized landmark error.

Records and ground truths are matched by ``image_id``; both sides must cover
exactly the same ids. Score ties rank the lower index first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from .attention import LandmarkSet, Visibility


class IdMismatchError(ValueError):
    """Prediction and ground-truth ids do not line up."""

    def __init__(self, offenders: Sequence[str]):
        self.offenders = list(offenders)
        shown = ", ".join(self.offenders[:10])
        more = "" if len(self.offenders) <= 10 else f" (+{len(self.offenders) - 10} more)"
        super().__init__(f"{len(self.offenders)} unmatched image ids: {shown}{more}")


@dataclass(frozen=True)
class ScoreRecord:
    image_id: str
    category_scores: Optional[np.ndarray] = None
    attribute_scores: Optional[np.ndarray] = None
    predicted_landmarks: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self):
        if self.category_scores is None and self.attribute_scores is None and self.predicted_landmarks is None:
            raise ValueError(f"{self.image_id}: record carries no payload")


@dataclass(frozen=True)
class GroundTruth:
    image_id: str
    category: Optional[int] = None
    attributes: Optional[frozenset[int]] = None
    landmarks: Optional[LandmarkSet] = None
    image_width: Optional[float] = None
    image_height: Optional[float] = None


def topk_indices(scores, k: int) -> np.ndarray:
    """Indices of the ``k`` largest scores, ties going to the lower index."""
    scores = np.asarray(scores, dtype=np.float64)
    # stable sort on negated scores keeps equal scores in index order
    return np.argsort(-scores, kind="stable")[:k]


def match(records: Sequence[ScoreRecord], truths: Sequence[GroundTruth]) -> list[tuple[ScoreRecord, GroundTruth]]:
    """Pair records with truths by id, in ground-truth order."""
    by_id = {r.image_id: r for r in records}
    if len(by_id) != len(records):
        seen, dup = set(), []
        for r in records:
            if r.image_id in seen:
                dup.append(r.image_id)
            seen.add(r.image_id)
        raise IdMismatchError(dup)
    truth_ids = [t.image_id for t in truths]
    offenders = [i for i in truth_ids if i not in by_id]
    known = set(truth_ids)
    offenders += [r.image_id for r in records if r.image_id not in known]
    if offenders:
        raise IdMismatchError(offenders)
    return [(by_id[t.image_id], t) for t in truths]


def _check_k(k: int, n: int, what: str) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds {what} count {n}")


def topk_accuracy(records: Sequence[ScoreRecord], truths: Sequence[GroundTruth], k: int) -> float:
    pairs = match(records, truths)
    if not pairs:
        raise ValueError("no samples")
    hits = 0
    for rec, gt in pairs:
        scores = rec.category_scores
        if scores is None or gt.category is None:
            raise ValueError(f"{rec.image_id}: missing category scores or label")
        _check_k(k, len(scores), "class")
        if not 0 <= gt.category < len(scores):
            raise ValueError(f"{rec.image_id}: category {gt.category} out of range")
        hits += int(gt.category in topk_indices(scores, k))
    return hits / len(pairs)


def topk_recall(records: Sequence[ScoreRecord], truths: Sequence[GroundTruth], k: int,
                average: Literal["micro", "macro"] = "micro") -> float:
    """Share of ground-truth attributes found among each sample's top-k scores.

    ``micro`` pools hits and positives over the dataset; ``macro`` averages
    per-sample recall. Samples without positive attributes are skipped.
    """
    if average not in ("micro", "macro"):
        raise ValueError(f"unknown average {average!r}")
    hits = total = 0
    per_sample = []
    for rec, gt in match(records, truths):
        scores = rec.attribute_scores
        if scores is None or gt.attributes is None:
            raise ValueError(f"{rec.image_id}: missing attribute scores or labels")
        _check_k(k, len(scores), "attribute")
        if not gt.attributes:
            continue
        found = len(set(topk_indices(scores, k).tolist()) & gt.attributes)
        hits += found
        total += len(gt.attributes)
        per_sample.append(found / len(gt.attributes))
    if total == 0:
        raise ValueError("no positive attributes")
    if average == "macro":
        return math.fsum(per_sample) / len(per_sample)
    return hits / total


def landmark_distances(rec: ScoreRecord, gt: GroundTruth, visible_only: bool = False) -> list[float]:
    """Normalized distance of each evaluated landmark of one image."""
    if gt.landmarks is None or gt.image_width is None or gt.image_height is None:
        raise ValueError(f"{gt.image_id}: ground truth lacks landmarks or image size")
    if rec.predicted_landmarks is None:
        raise ValueError(f"{rec.image_id}: record has no predicted landmarks")
    wanted = {Visibility.VISIBLE} if visible_only else {Visibility.VISIBLE, Visibility.OCCLUDED}
    out = []
    for i, p in enumerate(gt.landmarks.points):
        if p.visibility not in wanted:
            continue
        if i >= len(rec.predicted_landmarks):
            raise ValueError(f"{rec.image_id}: no prediction for landmark {i}")
        px, py = rec.predicted_landmarks[i]
        out.append(math.hypot((px - p.x) / gt.image_width, (py - p.y) / gt.image_height))
    return out


def normalized_error(records: Sequence[ScoreRecord], truths: Sequence[GroundTruth],
                     visible_only: bool = False) -> float:
    """Mean per-landmark distance with each axis scaled by its image size."""
    dists = []
    for rec, gt in match(records, truths):
        dists.extend(landmark_distances(rec, gt, visible_only))
    if not dists:
        raise ValueError("no landmarks to evaluate")
    return math.fsum(dists) / len(dists)
