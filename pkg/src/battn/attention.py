"""Boundary-awareness attention maps built from garment landmarks.

Pipeline for a usable landmark set: quantize to pixels, gift-wrap the convex
boundary, scanline-fill it, blur, normalize to a peak of 1, then lift the
background to ``floor``. Sets that cannot span an area (fewer than three
distinct points, or all collinear) get a sum of Gaussian stamps instead.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Optional, Sequence

import numpy as np

from .geometry import Point, convex_boundary, orientation, quantize
from .raster import BlurConfig, bresenham, gaussian_blur, normalize, resample_bilinear, scanline_fill


class Visibility(enum.IntEnum):
    VISIBLE = 0
    OCCLUDED = 1
    MISSING = 2


class Landmark(NamedTuple):
    x: float
    y: float
    visibility: Visibility = Visibility.VISIBLE


@dataclass(frozen=True)
class LandmarkSet:
    image_id: str
    points: tuple[Landmark, ...] = ()

    def __post_init__(self):
        pts = tuple(Landmark(float(p[0]), float(p[1]), Visibility(int(p[2]))) for p in self.points)
        object.__setattr__(self, "points", pts)
        for p in pts:
            if p.visibility != Visibility.MISSING and not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise ValueError(f"{self.image_id}: non-finite landmark {tuple(p)}")


@dataclass(frozen=True)
class AttentionConfig:
    include_occluded: bool = True
    blur: BlurConfig = field(default_factory=BlurConfig)
    floor: float = 0.0
    fallback_sigma: float = 8.0

    def __post_init__(self):
        if not 0.0 <= self.floor < 1.0:
            raise ValueError(f"floor must lie in [0, 1), got {self.floor}")
        if not self.fallback_sigma > 0:
            raise ValueError(f"fallback_sigma must be > 0, got {self.fallback_sigma}")


class AttentionResult(NamedTuple):
    grid: np.ndarray
    # None when the convex-fill path ran, otherwise a short reason string
    fallback: Optional[str]


def usable_pixels(lm: LandmarkSet, include_occluded: bool = True) -> list[Point]:
    """Quantized, deduplicated pixels of the landmarks that take part in the map."""
    out: list[Point] = []
    seen = set()
    for p in lm.points:
        if p.visibility == Visibility.MISSING:
            continue
        if p.visibility == Visibility.OCCLUDED and not include_occluded:
            continue
        q = quantize(p.x, p.y)
        if q not in seen:
            seen.add(q)
            out.append(q)
    return out


def _all_collinear(pts: Sequence[Point]) -> bool:
    a, b = pts[0], pts[1]
    return all(orientation(a, b, c) == 0 for c in pts[2:])


def boundary_mask(pixels: Sequence[Point], width: int, height: int) -> np.ndarray:
    """Filled convex boundary of the given pixels, before any blurring."""
    return scanline_fill(convex_boundary(pixels), width, height)


def gaussian_stamps(stamps: Sequence[Point], width: int, height: int, sigma: float) -> np.ndarray:
    """Sum of isotropic Gaussians centred on the given pixels (unnormalized)."""
    xs = np.arange(width, dtype=np.float64)
    ys = np.arange(height, dtype=np.float64)
    out = np.zeros((height, width))
    inv = 1.0 / (2.0 * sigma * sigma)
    for px, py in stamps:
        out += np.outer(np.exp(-((ys - py) ** 2) * inv), np.exp(-((xs - px) ** 2) * inv))
    return out


def _lift(grid: np.ndarray, floor: float) -> np.ndarray:
    # written as 1 - (1-floor)(1-v) so v == 1 maps to exactly 1.0
    return np.clip(1.0 - (1.0 - floor) * (1.0 - grid), floor, 1.0)


def attention_map(lm: LandmarkSet, width: int, height: int,
                  cfg: AttentionConfig = AttentionConfig()) -> AttentionResult:
    """Build the attention map and report whether the fallback path was taken."""
    if width < 1 or height < 1:
        raise ValueError(f"grid dimensions must be >= 1, got {width}x{height}")
    pts = usable_pixels(lm, cfg.include_occluded)

    if not pts:
        return AttentionResult(np.full((height, width), cfg.floor), "empty: no usable landmarks")

    if len(pts) >= 3 and not _all_collinear(pts):
        raw = gaussian_blur(boundary_mask(pts, width, height), cfg.blur)
        reason = None
    else:
        # two points also get stamps along the segment joining them
        stamps = bresenham(pts[0], pts[1]) if len(pts) == 2 else pts
        raw = gaussian_stamps(stamps, width, height, cfg.fallback_sigma)
        if len(pts) > 2:
            reason = f"degenerate: {len(pts)} collinear points"
        else:
            reason = f"degenerate: {len(pts)} point{'s' if len(pts) == 2 else ''}"

    if not raw.max() > 0:
        # everything landed outside the grid or underflowed
        return AttentionResult(np.full((height, width), cfg.floor), "off-grid")
    return AttentionResult(_lift(normalize(raw), cfg.floor), reason)


def build_attention_map(lm: LandmarkSet, width: int, height: int,
                        cfg: AttentionConfig = AttentionConfig()) -> np.ndarray:
    """Attention map in ``[cfg.floor, 1]`` of shape ``(height, width)``."""
    return attention_map(lm, width, height, cfg).grid


def apply_attention(features: np.ndarray, amap: np.ndarray,
                    mode: Literal["multiply", "residual"] = "residual") -> np.ndarray:
    """Reweight a ``(C, H, W)`` feature volume by an attention map.

    The map is bilinearly resampled to ``H x W`` first when needed.
    ``multiply`` gives ``f * A``; ``residual`` gives ``f * (1 + A)``.
    """
    features = np.asarray(features, dtype=np.float64)
    amap = np.asarray(amap, dtype=np.float64)
    if features.ndim != 3 or amap.ndim != 2:
        raise ValueError(f"expected (C,H,W) features and (H,W) map, got {features.shape} and {amap.shape}")
    _, h, w = features.shape
    if amap.shape != (h, w):
        amap = resample_bilinear(amap, w, h)
    if mode == "multiply":
        return features * amap
    if mode == "residual":
        return features * (1.0 + amap)
    raise ValueError(f"unknown mode {mode!r}")


def concat_channels(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Stack two ``(C, H, W)`` volumes along channels, ``a`` first."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 3 or b.ndim != 3:
        raise ValueError(f"expected (C,H,W) volumes, got {a.shape} and {b.shape}")
    # a zero-channel volume is the identity whatever its spatial size
    if b.shape[0] == 0:
        return a.copy()
    if a.shape[0] == 0:
        return b.copy()
    if a.shape[1:] != b.shape[1:]:
        raise ValueError(
            f"spatial size mismatch {a.shape[1:]} vs {b.shape[1:]}; "
            "resample one volume (resample_bilinear per channel) before concatenating"
        )
    return np.concatenate([a, b], axis=0)
