"""Training losses with analytic gradients and landmark heatmap targets.

Every loss returns ``(loss, grad)`` with ``grad`` shaped like the prediction.
Reductions are means, so the positive weight keeps its meaning at any batch
size.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attention import LandmarkSet, Visibility

ATTRIBUTE_POS_WEIGHT = 332.0


@dataclass(frozen=True)
class HeatmapTargetConfig:
    out_width: int = 64
    out_height: int = 64
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.out_width < 1 or self.out_height < 1:
            raise ValueError("heatmap dimensions must be >= 1")


@dataclass(frozen=True)
class LossConfig:
    pos_weight: float = ATTRIBUTE_POS_WEIGHT

    def __post_init__(self):
        if not (np.isfinite(self.pos_weight) and self.pos_weight > 0):
            raise ValueError(f"pos_weight must be finite and > 0, got {self.pos_weight}")


def heatmap_target(lm: LandmarkSet, cfg: HeatmapTargetConfig = HeatmapTargetConfig()) -> np.ndarray:
    """One Gaussian channel per landmark, shape ``(K, out_height, out_width)``.

    Landmarks must already be in heatmap pixel coordinates; pixel ``(x, y)``
    is evaluated at exactly ``(x, y)``. Missing landmarks give a zero channel.
    """
    xs = np.arange(cfg.out_width, dtype=np.float64)
    ys = np.arange(cfg.out_height, dtype=np.float64)
    out = np.zeros((len(lm.points), cfg.out_height, cfg.out_width))
    inv = 1.0 / (2.0 * cfg.sigma ** 2)
    for k, p in enumerate(lm.points):
        if p.visibility == Visibility.MISSING:
            continue
        out[k] = np.outer(np.exp(-((ys - p.y) ** 2) * inv), np.exp(-((xs - p.x) ** 2) * inv))
    return out


def mse_loss(pred, target):
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: pred {pred.shape} vs target {target.shape}")
    diff = pred - target
    n = diff.size
    return float(np.mean(diff * diff)), 2.0 * diff / n


def log_softmax(logits):
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max()
    return z - np.log(np.exp(z).sum())


def softmax_cross_entropy(logits, label: int):
    """Cross entropy of one logit vector against a class index."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 1 or logits.size < 2:
        raise ValueError(f"need a vector of >= 2 logits, got shape {logits.shape}")
    if not 0 <= label < logits.size:
        raise ValueError(f"label {label} out of range for {logits.size} classes")
    logp = log_softmax(logits)
    grad = np.exp(logp)
    grad[label] -= 1.0
    return float(-logp[label]), grad


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def asym_weighted_bce(logits, labels, cfg: LossConfig = LossConfig()):
    """Binary cross entropy whose positive term is scaled by ``cfg.pos_weight``.

    Per element ``-[W y log s(x) + (1 - y) log(1 - s(x))]``, averaged. The
    log-sigmoid terms go through ``logaddexp`` so large logits never overflow.
    """
    x = np.asarray(logits, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} logits vs {y.shape} labels")
    w = cfg.pos_weight
    # -log s(x) = softplus(-x), -log(1 - s(x)) = softplus(x)
    per = w * y * np.logaddexp(0.0, -x) + (1.0 - y) * np.logaddexp(0.0, x)
    s = sigmoid(x)
    n = x.size
    grad = ((1.0 - y) * s - w * y * (1.0 - s)) / n
    return float(per.mean()), grad
