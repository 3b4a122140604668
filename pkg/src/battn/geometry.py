"""Exact integer convex boundary construction (gift wrapping).

Coordinates live in image space: x grows to the right, y grows downward.
The hull is walked so that every input point satisfies
``orientation(a, b, p) >= 0`` for each boundary edge ``(a, b)``; this is the
counter-clockwise winding of the math convention, which appears clockwise on
screen because of the flipped y axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence


class Point(NamedTuple):
    x: int
    y: int


@dataclass(frozen=True)
class Edge:
    a: Point
    b: Point

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"zero-length edge at {tuple(self.a)}")


@dataclass(frozen=True)
class ConvexBoundary:
    """Hull vertices in walk order plus the closed edge cycle over them.

    ``dropped`` holds every distinct input point that never became a vertex:
    strictly interior points and points lying on a hull edge between two
    vertices.
    """

    vertices: tuple[Point, ...]
    edges: tuple[Edge, ...]
    dropped: tuple[Point, ...] = ()

    @property
    def degenerate(self) -> bool:
        """True for zero-area boundaries (a point or a there-and-back segment)."""
        return len(self.vertices) < 3


def orientation(a: Point, b: Point, c: Point) -> int:
    """Cross product ``(b - a) x (c - a)``.

    Positive for a left turn, negative for a right turn, zero when collinear.
    """
    # Python ints are arbitrary precision, so no overflow for any coordinate size.
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def quantize(x: float, y: float) -> Point:
    """Round a real landmark to its pixel, half-up on each axis."""
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite landmark ({x}, {y})")
    return Point(math.floor(x + 0.5), math.floor(y + 0.5))


def _as_points(points: Iterable[Sequence[int]]) -> list[Point]:
    out = []
    seen = set()
    for p in points:
        q = Point(int(p[0]), int(p[1]))
        if q not in seen:
            seen.add(q)
            out.append(q)
    return out


def select_start(points: Sequence[Point]) -> Point:
    """Minimal y, ties broken by minimal x. Always a hull vertex."""
    if not points:
        raise ValueError("no landmarks")
    return min((Point(int(p[0]), int(p[1])) for p in points), key=lambda p: (p[1], p[0]))


def _dist2(a: Point, b: Point) -> int:
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def next_hull_vertex(current: Point, remaining: Sequence[Point]) -> Point:
    """Pick the candidate that leaves every other candidate on its left side.

    Among candidates collinear with the winning direction the farthest one is
    taken, so points lying along a hull edge are skipped.
    """
    best = remaining[0]
    for p in remaining[1:]:
        turn = orientation(current, best, p)
        if turn < 0 or (turn == 0 and _dist2(current, p) > _dist2(current, best)):
            best = p
    return best


def convex_boundary(points: Iterable[Sequence[int]]) -> ConvexBoundary:
    """Gift-wrap the hull of integer points.

    Walks from :func:`select_start` until the start vertex is chosen again,
    which appends the closing edge. Inputs are deduplicated first. A single
    point yields one vertex and no edges; collinear inputs yield their two
    extreme points joined by a there-and-back edge pair.
    """
    pts = _as_points(points)
    start = select_start(pts)
    if len(pts) == 1:
        return ConvexBoundary((start,), (), ())

    vertices = [start]
    edges = []
    current = start
    # Exact predicates guarantee closure within len(pts) steps; the bound only
    # guards against a broken invariant turning into a hang.
    for _ in range(len(pts)):
        candidates = [p for p in pts if p != current]
        chosen = next_hull_vertex(current, candidates)
        edges.append(Edge(current, chosen))
        if chosen == start:
            break
        vertices.append(chosen)
        current = chosen
    else:
        raise RuntimeError("gift wrapping failed to close the boundary")

    on_hull = set(vertices)
    dropped = tuple(p for p in pts if p not in on_hull)
    return ConvexBoundary(tuple(vertices), tuple(edges), dropped)
