"""Pixel-level primitives: line rasterization, polygon fill, blur, resampling.

Grids are plain ``float64`` numpy arrays of shape ``(height, width)`` indexed
``grid[y, x]``. Binary masks use 0.0/1.0 in the same representation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence, Union

import numpy as np

from .geometry import ConvexBoundary, Point


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def bresenham(a: Sequence[int], b: Sequence[int]) -> list[Point]:
    """Integer rasterization of the segment ``a -> b``, endpoints included.

    The line is always traced from the lexicographically smaller endpoint, so
    both directions give the same pixel set; the list is returned starting at
    ``a``. Along the major axis each minor coordinate is the ideal line value
    rounded half-up, tracked with an integer error term.
    """
    a = Point(int(a[0]), int(a[1]))
    b = Point(int(b[0]), int(b[1]))
    flip = b < a
    p, q = (b, a) if flip else (a, b)

    dx, dy = q.x - p.x, q.y - p.y
    x_major = abs(dx) >= abs(dy)
    n = abs(dx) if x_major else abs(dy)
    if n == 0:
        return [p]
    step = 1 if (dx if x_major else dy) > 0 else -1
    slope = dy if x_major else dx

    # minor offset at step t is floor((2*t*slope + n) / (2*n)); keep the
    # numerator remainder in [0, 2n) while stepping
    two_n = 2 * n
    offset = 0
    rem = n
    out = [p]
    for t in range(1, n + 1):
        rem += 2 * slope
        while rem >= two_n:
            rem -= two_n
            offset += 1
        while rem < 0:
            rem += two_n
            offset -= 1
        if x_major:
            out.append(Point(p.x + step * t, p.y + offset))
        else:
            out.append(Point(p.x + offset, p.y + step * t))
    if flip:
        out.reverse()
    return out


def _stamp(grid: np.ndarray, pixels: Sequence[Point]) -> None:
    h, w = grid.shape
    for x, y in pixels:
        if 0 <= x < w and 0 <= y < h:
            grid[y, x] = 1.0


def rasterize_boundary(boundary: ConvexBoundary, width: int, height: int) -> np.ndarray:
    """Binary grid of every pixel drawn by Bresenham over the boundary edges."""
    _check_dims(width, height)
    grid = np.zeros((height, width), dtype=np.float64)
    if not boundary.edges:
        _stamp(grid, boundary.vertices)
    for e in boundary.edges:
        _stamp(grid, bresenham(e.a, e.b))
    return grid


def scanline_fill(boundary: ConvexBoundary, width: int, height: int) -> np.ndarray:
    """Fill the boundary polygon, unioned with its rasterized outline.

    A vertex at pixel ``(vx, vy)`` stands for that pixel's center, the same
    convention quantization and :func:`bresenham` use. Each row is sampled
    through its pixel centers against the polygon's vertex edges, half-open in
    y so a shared vertex is counted once. Crossings are paired by parity and a
    pixel is filled when its center lies in ``[left, right)``. All crossing
    arithmetic is exact integer math.
    """
    grid = rasterize_boundary(boundary, width, height)
    if boundary.degenerate:
        return grid

    edges = [(e.a, e.b) if e.a.y < e.b.y else (e.b, e.a) for e in boundary.edges if e.a.y != e.b.y]
    ys = [v.y for v in boundary.vertices]
    for y in range(max(0, min(ys)), min(height - 1, max(ys)) + 1):
        # crossing x as an exact fraction num / den with den > 0
        crossings = []
        for lo, hi in edges:
            if lo.y <= y < hi.y:
                den = hi.y - lo.y
                crossings.append((lo.x * den + (y - lo.y) * (hi.x - lo.x), den))
        crossings.sort(key=lambda f: Fraction(f[0], f[1]))
        for (n0, d0), (n1, d1) in zip(crossings[0::2], crossings[1::2]):
            x0 = max(0, _ceil_div(n0, d0))
            x1 = min(width, _ceil_div(n1, d1))
            if x1 > x0:
                grid[y, x0:x1] = 1.0
    return grid


@dataclass(frozen=True)
class BlurConfig:
    """Gaussian blur settings; ``sigma="auto"`` scales with the grid size."""

    sigma: Union[float, Literal["auto"]] = "auto"

    def __post_init__(self):
        if self.sigma != "auto":
            s = float(self.sigma)
            if not math.isfinite(s) or s < 0:
                raise ValueError(f"sigma must be >= 0 or 'auto', got {self.sigma!r}")

    def resolve(self, width: int, height: int) -> float:
        if self.sigma == "auto":
            return max(0.5, 0.05 * min(width, height))
        return float(self.sigma)

    def radius(self, width: int = 1, height: int = 1) -> int:
        return kernel_radius(self.resolve(width, height))


def kernel_radius(sigma: float) -> int:
    return math.ceil(3.0 * sigma) if sigma > 0 else 0


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Sampled 1-D Gaussian truncated at ``ceil(3 sigma)``, summing to 1."""
    r = kernel_radius(sigma)
    if r == 0:
        return np.ones(1)
    k = np.arange(-r, r + 1, dtype=np.float64)
    w = np.exp(-(k * k) / (2.0 * sigma * sigma))
    return w / w.sum()


def _reflect_index(n: int, r: int) -> np.ndarray:
    # mirror about the edge pixel without repeating it: -1 -> 1, n -> n-2
    idx = np.arange(-r, n + r)
    if n == 1:
        return np.zeros_like(idx)
    period = 2 * (n - 1)
    idx = np.mod(idx, period)
    return np.where(idx >= n, period - idx, idx)


def _convolve_axis(grid: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    r = len(kernel) // 2
    n = grid.shape[axis]
    padded = np.take(grid, _reflect_index(n, r), axis=axis)
    out = np.zeros_like(grid)
    for i, w in enumerate(kernel):
        sl = [slice(None)] * grid.ndim
        sl[axis] = slice(i, i + n)
        out += w * padded[tuple(sl)]
    return out


def gaussian_blur(grid: np.ndarray, cfg: BlurConfig = BlurConfig()) -> np.ndarray:
    """Separable Gaussian blur, horizontal pass then vertical, mirror borders."""
    grid = np.asarray(grid, dtype=np.float64)
    h, w = grid.shape
    kernel = gaussian_kernel(cfg.resolve(w, h))
    if len(kernel) == 1:
        return grid.copy()
    return _convolve_axis(_convolve_axis(grid, kernel, axis=1), kernel, axis=0)


def _resample_axis(grid: np.ndarray, out_n: int, axis: int) -> np.ndarray:
    n = grid.shape[axis]
    if n == out_n:
        return grid
    src = (np.arange(out_n) + 0.5) * (n / out_n) - 0.5
    src = np.clip(src, 0.0, n - 1)
    i0 = np.floor(src).astype(np.intp)
    i1 = np.minimum(i0 + 1, n - 1)
    frac = src - i0
    shape = [1] * grid.ndim
    shape[axis] = out_n
    frac = frac.reshape(shape)
    return np.take(grid, i0, axis=axis) * (1.0 - frac) + np.take(grid, i1, axis=axis) * frac


def resample_bilinear(grid: np.ndarray, out_width: int, out_height: int) -> np.ndarray:
    """Bilinear resize with half-pixel center alignment and clamped edges."""
    _check_dims(out_width, out_height)
    grid = np.asarray(grid, dtype=np.float64)
    out = _resample_axis(grid, out_width, axis=1)
    out = _resample_axis(out, out_height, axis=0)
    return out.copy() if out is grid else out


def normalize(grid: np.ndarray) -> np.ndarray:
    """Scale so the maximum becomes 1; grids with max <= 0 come back unchanged."""
    grid = np.asarray(grid, dtype=np.float64)
    peak = grid.max()
    if peak > 0:
        return grid / peak
    return grid.copy()


def encode_pgm(grid: np.ndarray) -> bytes:
    """Binary PGM (P5, maxval 255); each value v maps to round-half-up(v * 255)."""
    grid = np.asarray(grid, dtype=np.float64)
    h, w = grid.shape
    pix = np.clip(np.floor(grid * 255.0 + 0.5), 0, 255).astype(np.uint8)
    return b"P5\n%d %d\n255\n" % (w, h) + pix.tobytes()


def decode_pgm(data: bytes) -> np.ndarray:
    """Inverse of :func:`encode_pgm` for its exact header layout; values in [0,1]."""
    parts = data.split(b"\n", 3)
    if len(parts) != 4 or parts[0] != b"P5" or parts[2] != b"255":
        raise ValueError("not a P5/255 PGM in canonical layout")
    w, h = (int(t) for t in parts[1].split())
    body = parts[3]
    if len(body) != w * h:
        raise ValueError(f"expected {w * h} pixel bytes, got {len(body)}")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w) / 255.0


def _check_dims(width: int, height: int) -> None:
    if width < 1 or height < 1:
        raise ValueError(f"grid dimensions must be >= 1, got {width}x{height}")
