"""
From garment landmarks to an attention map
==========================================

Walks a single set of landmarks through hull, outline, fill and blur,
printing each stage as ASCII art on a small grid.
"""
import numpy as np

from battn import AttentionConfig, LandmarkSet, apply_attention, attention_map
from battn.geometry import convex_boundary
from battn.raster import BlurConfig, gaussian_blur, rasterize_boundary, scanline_fill


def show(grid, title):
    print(title)
    ramp = " .:-=+*#%@"
    for row in grid:
        print("  " + "".join(ramp[min(9, int(v * 9.999))] for v in row))
    print()


# six landmarks of a shirt on a 32x24 grid: collar pair, sleeves, hem pair.
# the last one is flagged occluded (1); a missing one (2) is ignored outright
shirt = LandmarkSet("shirt", (
    (11, 3, 0), (20, 3, 0),
    (3, 9, 0), (28, 10, 0),
    (9, 21, 0), (22, 20, 1),
    (15, 12, 2),
))
W, H = 32, 24

# the hull keeps the outermost points in counter-clockwise order
pts = [(int(x), int(y)) for x, y, v in shirt.points if v != 2]
hull = convex_boundary(pts)
print("hull vertices:", list(hull.vertices))
print("points left inside:", list(hull.dropped))
print()

show(rasterize_boundary(hull, W, H), "outline")
filled = scanline_fill(hull, W, H)
show(filled, "filled")
show(gaussian_blur(filled, BlurConfig(1.5)), "blurred, sigma 1.5")

# the packaged pipeline does all of the above, then normalizes and lifts to a floor
res = attention_map(shirt, W, H, AttentionConfig(blur=BlurConfig(1.5), floor=0.2))
show(res.grid, "attention map with floor 0.2")
print("range:", res.grid.min(), res.grid.max())

# dropping occluded landmarks changes the shape of the highlighted region
res = attention_map(shirt, W, H, AttentionConfig(include_occluded=False, blur=BlurConfig(1.5)))
show(res.grid, "visible landmarks only")

# fewer than three distinct points cannot span a region; Gaussian bumps stand in
two = LandmarkSet("pair", ((6, 6, 0), (25, 17, 0)))
res = attention_map(two, W, H, AttentionConfig(fallback_sigma=2.0))
print("fallback:", res.fallback)
show(res.grid, "two-point fallback")

# attention scales a feature map; residual mode keeps the background
features = np.ones((2, H, W))
out = apply_attention(features, attention_map(shirt, W, H).grid, "residual")
print("residual-weighted feature range:", out.min(), out.max())
