import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from battn.attention import LandmarkSet
from battn.losses import (
    HeatmapTargetConfig,
    LossConfig,
    asym_weighted_bce,
    heatmap_target,
    mse_loss,
    softmax_cross_entropy,
)

from oracles import central_diff_grad, relative_error


def test_heatmap_peak_and_missing():
    lm = LandmarkSet("a", ((3, 3, 0), (10, 5, 2)))
    hm = heatmap_target(lm, HeatmapTargetConfig(16, 16, 1.0))
    assert hm.shape == (2, 16, 16)
    assert hm[0, 3, 3] == 1.0
    assert hm[0, 4, 4] == pytest.approx(0.36787944117144233, abs=1e-15)
    assert not hm[1].any()


def test_heatmap_config_validation():
    with pytest.raises(ValueError):
        HeatmapTargetConfig(sigma=0.0)
    cfg = HeatmapTargetConfig()
    assert (cfg.out_width, cfg.out_height, cfg.sigma) == (64, 64, 1.0)


def test_mse_anchors():
    t = np.random.default_rng(0).random((2, 3, 3))
    loss, grad = mse_loss(t, t)
    assert loss == 0.0 and not grad.any()
    loss, _ = mse_loss(t + 1.0, t)
    assert loss == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        mse_loss(np.zeros(3), np.zeros(4))


def test_mse_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    p, t = rng.uniform(-5, 5, (2, 3, 3)), rng.uniform(-5, 5, (2, 3, 3))
    _, g = mse_loss(p, t)
    assert relative_error(g, central_diff_grad(lambda x: mse_loss(x, t)[0], p)) < 1e-5


def test_ce_anchors():
    loss, grad = softmax_cross_entropy(np.zeros(4), 2)
    assert abs(loss - math.log(4)) < 1e-12
    np.testing.assert_allclose(grad, [0.25, 0.25, -0.75, 0.25])
    logits = np.zeros(5)
    logits[1] = 50.0
    assert softmax_cross_entropy(logits, 1)[0] < 1e-9


def test_ce_errors():
    with pytest.raises(ValueError):
        softmax_cross_entropy(np.zeros(3), 3)
    with pytest.raises(ValueError):
        softmax_cross_entropy(np.zeros(1), 0)


def test_ce_gradient_matches_finite_differences():
    rng = np.random.default_rng(2)
    z = rng.uniform(-5, 5, 6)
    loss, g = softmax_cross_entropy(z, 4)
    assert relative_error(g, central_diff_grad(lambda x: softmax_cross_entropy(x, 4)[0], z)) < 1e-5
    assert abs(g.sum()) < 1e-12


def test_bce_anchors():
    loss, _ = asym_weighted_bce([0.0], [0.0])
    assert abs(loss - math.log(2)) < 1e-12
    loss, _ = asym_weighted_bce([0.0], [1.0], LossConfig(332))
    assert abs(loss - 332 * math.log(2)) < 1e-9
    assert LossConfig().pos_weight == 332


def test_bce_reduces_to_standard_with_unit_weight():
    rng = np.random.default_rng(3)
    x = rng.uniform(-5, 5, 20)
    y = (rng.random(20) > 0.5).astype(float)
    s = 1 / (1 + np.exp(-x))
    ref = -np.mean(y * np.log(s) + (1 - y) * np.log(1 - s))
    assert abs(asym_weighted_bce(x, y, LossConfig(1.0))[0] - ref) < 1e-12


def test_bce_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    x = rng.uniform(-5, 5, 10)
    y = (rng.random(10) > 0.5).astype(float)
    cfg = LossConfig(332)
    _, g = asym_weighted_bce(x, y, cfg)
    assert relative_error(g, central_diff_grad(lambda v: asym_weighted_bce(v, y, cfg)[0], x)) < 1e-5


def test_bce_errors():
    with pytest.raises(ValueError):
        asym_weighted_bce(np.zeros(3), np.zeros(2))
    with pytest.raises(ValueError):
        LossConfig(0.0)
    with pytest.raises(ValueError):
        LossConfig(float("inf"))


def test_bce_large_logits_stay_finite():
    x = np.array([-700.0, 700.0, -100.0, 100.0])
    y = np.array([1.0, 0.0, 0.0, 1.0])
    loss, g = asym_weighted_bce(x, y)
    assert np.isfinite(loss) and np.isfinite(g).all()
    assert loss == pytest.approx((332 * 700 + 700) / 4)


finite = st.floats(-100, 100, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(finite, min_size=2, max_size=12), st.data())
def test_ce_properties(logits, data):
    label = data.draw(st.integers(0, len(logits) - 1))
    loss, g = softmax_cross_entropy(logits, label)
    assert np.isfinite(loss) and loss >= 0
    assert np.isfinite(g).all()
    assert abs(g.sum()) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(finite, st.booleans()), min_size=1, max_size=12), st.floats(0.1, 500))
def test_bce_properties(pairs, w):
    x = np.array([p[0] for p in pairs])
    y = np.array([float(p[1]) for p in pairs])
    loss, g = asym_weighted_bce(x, y, LossConfig(w))
    assert np.isfinite(loss) and loss >= 0
    assert np.isfinite(g).all()


@settings(max_examples=100, deadline=None)
@given(st.lists(finite, min_size=1, max_size=20))
def test_mse_nonnegative(vals):
    p = np.array(vals)
    loss, _ = mse_loss(p, np.zeros_like(p))
    assert loss >= 0
