"""
Scoring predictions
===================

Top-k accuracy for categories, top-k recall for attributes and the
normalized landmark error, on a small synthetic set.
"""
import numpy as np

from battn import LandmarkSet
from battn.metrics import GroundTruth, IdMismatchError, ScoreRecord, normalized_error, topk_accuracy, topk_recall

rng = np.random.default_rng(3)
n, n_cat, n_attr = 200, 20, 60

# a weak classifier: the true class gets a small bonus over noise
labels = rng.integers(0, n_cat, n)
scores = rng.normal(size=(n, n_cat))
scores[np.arange(n), labels] += 1.5
recs = [ScoreRecord(f"img{i}", category_scores=s) for i, s in enumerate(scores)]
gts = [GroundTruth(f"img{i}", category=int(c)) for i, c in enumerate(labels)]
for k in (1, 3, 5):
    print(f"category top-{k}: {100 * topk_accuracy(recs, gts, k):.2f}")

# attributes are multi-label; recall counts how many true labels land in the top k
attrs = [frozenset(rng.choice(n_attr, rng.integers(1, 5), replace=False).tolist()) for _ in range(n)]
ascores = rng.normal(size=(n, n_attr))
for i, a in enumerate(attrs):
    ascores[i, list(a)] += 2.0
arecs = [ScoreRecord(f"img{i}", attribute_scores=s) for i, s in enumerate(ascores)]
agts = [GroundTruth(f"img{i}", attributes=a) for i, a in enumerate(attrs)]
for k in (3, 5):
    print(f"attribute top-{k} recall: micro {100 * topk_recall(arecs, agts, k):.2f}, "
          f"macro {100 * topk_recall(arecs, agts, k, average='macro'):.2f}")

# landmark error is measured in image-normalized units, so image size drops out
lrecs, lgts = [], []
for i in range(n):
    w, h = rng.uniform(200, 400, 2)
    true = [(rng.uniform(0, w), rng.uniform(0, h), int(rng.integers(0, 3))) for _ in range(8)]
    pred = tuple((x + rng.normal(0, 10), y + rng.normal(0, 10)) for x, y, _ in true)
    lgts.append(GroundTruth(f"img{i}", landmarks=LandmarkSet(f"img{i}", tuple(true)), image_width=w, image_height=h))
    lrecs.append(ScoreRecord(f"img{i}", predicted_landmarks=pred))
print(f"NE all labelled: {normalized_error(lrecs, lgts):.4f}")
print(f"NE visible only: {normalized_error(lrecs, lgts, visible_only=True):.4f}")

# records and ground truth are joined on id; anything unmatched is reported
try:
    topk_accuracy(recs[:-2], gts, 3)
except IdMismatchError as e:
    print("unmatched ids:", e.offenders)
