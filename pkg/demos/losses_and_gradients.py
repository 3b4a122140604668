"""
Losses and their gradients
==========================

Each loss returns ``(value, gradient)``. Here we check a few values by hand
and compare the gradients with finite differences.
"""
import math

import numpy as np

from battn import LandmarkSet
from battn.losses import HeatmapTargetConfig, LossConfig, asym_weighted_bce, heatmap_target, mse_loss, softmax_cross_entropy

rng = np.random.default_rng(0)


def numeric_grad(f, x, h=1e-6):
    g = np.zeros_like(x)
    for i in np.ndindex(x.shape):
        old = x[i]
        x[i] = old + h
        up = f(x)
        x[i] = old - h
        down = f(x)
        x[i] = old
        g[i] = (up - down) / (2 * h)
    return g


# landmark heads regress Gaussian heatmaps; a missing landmark gets an empty channel
lm = LandmarkSet("a", ((10, 12, 0), (40, 30, 1), (0, 0, 2)))
target = heatmap_target(lm, HeatmapTargetConfig(64, 64, 1.5))
print("heatmap target", target.shape, "peaks", target.max(axis=(1, 2)))

pred = target + rng.normal(0, 0.05, target.shape)
loss, grad = mse_loss(pred, target)
print(f"heatmap MSE {loss:.6f}, grad error {np.abs(grad - numeric_grad(lambda p: mse_loss(p, target)[0], pred.copy())).max():.2e}")

# category head: softmax cross entropy. Equal logits cost exactly ln C
loss, grad = softmax_cross_entropy(np.zeros(50), 7)
print(f"uniform CE over 50 classes: {loss:.12f} vs ln 50 = {math.log(50):.12f}")
z = rng.normal(size=10)
loss, grad = softmax_cross_entropy(z, 3)
print(f"CE {loss:.4f}, gradient sums to {grad.sum():.1e}")

# attribute head: positives are rare, so their term is weighted up (332 by default)
labels = (rng.random(1000) < 0.003).astype(float)
logits = rng.normal(-3, 1, 1000)
for w in (1.0, 332.0):
    loss, grad = asym_weighted_bce(logits, labels, LossConfig(w))
    pos = labels == 1
    print(f"W={w:>5}: loss {loss:.4f}, mean |grad| on positives {np.abs(grad[pos]).mean():.2e}, "
          f"negatives {np.abs(grad[~pos]).mean():.2e}")

loss, _ = asym_weighted_bce([0.0], [1.0])
print(f"single positive at logit 0: {loss:.6f} = 332 ln 2 = {332 * math.log(2):.6f}")
