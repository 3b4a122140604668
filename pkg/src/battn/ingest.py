"""Annotation and score file parsing, plus crop/resize coordinate transforms.

All native files share one layout: a magic line (``LANDMARKS v1``,
``SCORES v1``, ...), a line holding one integer (the per-row cap or vector
length), then whitespace-separated rows that start with an image id. Files
are UTF-8 with LF line endings; blank lines are skipped.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .attention import Landmark, LandmarkSet, Visibility
from .metrics import GroundTruth, ScoreRecord

LANDMARKS_MAGIC = "LANDMARKS v1"
SCORES_MAGIC = "SCORES v1"
CATEGORIES_MAGIC = "CATEGORIES v1"
ATTRIBUTES_MAGIC = "ATTRIBUTES v1"
SIZES_MAGIC = "SIZES v1"
BBOXES_MAGIC = "BBOXES v1"

DEEPFASHION_MAX_POINTS = 8

_REAL = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?\Z")
_INT = re.compile(r"[+-]?\d+\Z")
_TOKEN = re.compile(r"\S+")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}" + (f", column {column}" if column else "")
        super().__init__(f"{where}: {message}")


class _Token(NamedTuple):
    text: str
    line: int
    column: int

    def real(self) -> float:
        if not _REAL.match(self.text):
            raise ParseError(f"expected a real number, got {self.text!r}", self.line, self.column)
        return float(self.text)

    def int(self) -> int:
        if not _INT.match(self.text):
            raise ParseError(f"expected an integer, got {self.text!r}", self.line, self.column)
        return int(self.text)


def _rows(text: str, magic: str) -> tuple[int, Iterator[list[_Token]]]:
    """Check the two header lines, return the header integer and the row tokens."""
    if "\r" in text:
        raise ParseError("CR line endings are not allowed", text[: text.index("\r")].count("\n") + 1)
    lines = text.split("\n")
    if not lines or lines[0].strip() != magic:
        got = lines[0].strip() if lines else ""
        raise ParseError(f"expected header {magic!r}, got {got!r}", 1, 1)
    if len(lines) < 2 or not lines[1].strip():
        raise ParseError("missing header integer", 2, 1)
    header = [_Token(m.group(), 2, m.start() + 1) for m in _TOKEN.finditer(lines[1])]
    if len(header) != 1:
        raise ParseError("header line must hold exactly one integer", 2, 1)
    n = header[0].int()
    if n < 0:
        raise ParseError(f"header integer must be >= 0, got {n}", 2, 1)

    def gen():
        for i, line in enumerate(lines[2:], start=3):
            toks = [_Token(m.group(), i, m.start() + 1) for m in _TOKEN.finditer(line)]
            if toks:
                yield toks

    return n, gen()


def _end_of(toks: list[_Token]) -> tuple[int, int]:
    last = toks[-1]
    return last.line, last.column + len(last.text)


def _unique(ids: Iterable[tuple[str, int]]) -> None:
    seen = {}
    for image_id, line in ids:
        if image_id in seen:
            raise ParseError(f"duplicate image id {image_id!r} (first on line {seen[image_id]})", line, 1)
        seen[image_id] = line


def fmt_real(v: float) -> str:
    return format(float(v), ".17g")


# --- landmarks ---------------------------------------------------------------

def parse_landmarks(text: str) -> list[LandmarkSet]:
    """Parse a ``LANDMARKS v1`` file, one :class:`LandmarkSet` per row.

    Row layout: ``<image_id> <n> {<v> <x> <y>} x n`` with ``n`` at most the
    header cap. Coordinates of missing (``v = 2``) points are kept verbatim
    but never used downstream.
    """
    cap, rows = _rows(text, LANDMARKS_MAGIC)
    out = []
    ids = []
    for toks in rows:
        head = toks[0]
        if len(toks) < 2:
            raise ParseError(f"{head.text}: missing landmark count", *_end_of(toks))
        n = toks[1].int()
        if not 0 <= n <= cap:
            raise ParseError(f"{head.text}: landmark count {n} outside [0, {cap}]", toks[1].line, toks[1].column)
        body = toks[2:]
        if len(body) != 3 * n:
            line, col = _end_of(toks)
            if len(body) > 3 * n:
                col = body[3 * n].column
            raise ParseError(f"{head.text}: expected {n} (v, x, y) triples, found {len(body)} values", line, col)
        pts = []
        for j in range(n):
            vt, xt, yt = body[3 * j: 3 * j + 3]
            v = vt.int()
            if v not in (0, 1, 2):
                raise ParseError(f"{head.text}: visibility must be 0, 1 or 2, got {v}", vt.line, vt.column)
            pts.append(Landmark(xt.real(), yt.real(), Visibility(v)))
        out.append(LandmarkSet(head.text, tuple(pts)))
        ids.append((head.text, head.line))
    _unique(ids)
    return out


def format_landmarks(sets: Sequence[LandmarkSet], max_points: Optional[int] = None) -> str:
    if max_points is None:
        max_points = max((len(s.points) for s in sets), default=0)
    lines = [LANDMARKS_MAGIC, str(max_points)]
    for s in sets:
        if len(s.points) > max_points:
            raise ValueError(f"{s.image_id}: {len(s.points)} points exceed cap {max_points}")
        parts = [s.image_id, str(len(s.points))]
        for p in s.points:
            parts += [str(int(p.visibility)), fmt_real(p.x), fmt_real(p.y)]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_deepfashion_landmarks(text: str) -> list[LandmarkSet]:
    """Adapter for DeepFashion ``list_landmarks.txt``.

    That file starts with a row count and a column-name line; each row is
    ``<image_name> <clothes_type> <variation_type>`` followed by up to eight
    ``<visibility> <x> <y>`` triples.
    """
    lines = text.replace("\r\n", "\n").split("\n")
    native = [LANDMARKS_MAGIC, str(DEEPFASHION_MAX_POINTS)]
    for raw in lines[2:]:
        toks = raw.split()
        body = toks[3:]
        # blank lines stay in place so line numbers match the original file
        native.append(" ".join([toks[0], str(len(body) // 3)] + body) if toks else "")
    try:
        return parse_landmarks("\n".join(native) + "\n")
    except ParseError as e:
        # columns refer to the rewritten row, so report the line only
        raise ParseError(e.message, e.line) from None


# --- scores and ground truth -------------------------------------------------

def parse_vectors(text: str, magic: str, expected_len: Optional[int] = None) -> list[tuple[str, np.ndarray]]:
    """Rows of ``<image_id>`` followed by a fixed-length real vector."""
    n, rows = _rows(text, magic)
    if expected_len is not None and expected_len != n:
        raise ParseError(f"header declares length {n}, expected {expected_len}", 2, 1)
    out = []
    ids = []
    for toks in rows:
        head = toks[0]
        vals = toks[1:]
        if len(vals) != n:
            raise ParseError(f"{head.text}: expected {n} values, got {len(vals)}", *_end_of(toks))
        out.append((head.text, np.array([t.real() for t in vals], dtype=np.float64)))
        ids.append((head.text, head.line))
    _unique(ids)
    return out


def parse_scores(text: str, expected_len: Optional[int] = None, kind: str = "category") -> list[ScoreRecord]:
    """Parse a ``SCORES v1`` file into records carrying ``kind`` scores.

    ``kind`` is ``"category"`` or ``"attribute"``.
    """
    if kind not in ("category", "attribute"):
        raise ValueError(f"unknown score kind {kind!r}")
    field = f"{kind}_scores"
    return [ScoreRecord(i, **{field: v}) for i, v in parse_vectors(text, SCORES_MAGIC, expected_len)]


def format_scores(rows: Sequence[tuple[str, Sequence[float]]]) -> str:
    n = len(rows[0][1]) if rows else 0
    lines = [SCORES_MAGIC, str(n)]
    for image_id, vec in rows:
        if len(vec) != n:
            raise ValueError(f"{image_id}: vector length {len(vec)} != {n}")
        lines.append(" ".join([image_id] + [fmt_real(v) for v in vec]))
    return "\n".join(lines) + "\n"


def parse_categories(text: str) -> tuple[int, list[GroundTruth]]:
    """``CATEGORIES v1`` file: header holds the class count, rows ``<id> <cat>``."""
    n_classes, rows = _rows(text, CATEGORIES_MAGIC)
    out, ids = [], []
    for toks in rows:
        if len(toks) != 2:
            raise ParseError(f"{toks[0].text}: expected one category index", *_end_of(toks))
        cat = toks[1].int()
        if not 0 <= cat < n_classes:
            raise ParseError(f"{toks[0].text}: category {cat} outside [0, {n_classes})", toks[1].line, toks[1].column)
        out.append(GroundTruth(toks[0].text, category=cat))
        ids.append((toks[0].text, toks[0].line))
    _unique(ids)
    return n_classes, out


def parse_attributes(text: str) -> tuple[int, list[GroundTruth]]:
    """``ATTRIBUTES v1`` file: header holds the attribute count, rows ``<id> <m> <a_1> ... <a_m>``."""
    n_attrs, rows = _rows(text, ATTRIBUTES_MAGIC)
    out, ids = [], []
    for toks in rows:
        head = toks[0]
        if len(toks) < 2:
            raise ParseError(f"{head.text}: missing attribute count", *_end_of(toks))
        m = toks[1].int()
        vals = toks[2:]
        if m < 0 or len(vals) != m:
            raise ParseError(f"{head.text}: declared {m} attributes, found {len(vals)}", *_end_of(toks))
        attrs = set()
        for t in vals:
            a = t.int()
            if not 0 <= a < n_attrs:
                raise ParseError(f"{head.text}: attribute {a} outside [0, {n_attrs})", t.line, t.column)
            attrs.add(a)
        out.append(GroundTruth(head.text, attributes=frozenset(attrs)))
        ids.append((head.text, head.line))
    _unique(ids)
    return n_attrs, out


def format_categories(n_classes: int, rows: Sequence[tuple[str, int]]) -> str:
    return "\n".join([CATEGORIES_MAGIC, str(n_classes)] + [f"{i} {c}" for i, c in rows]) + "\n"


def format_attributes(n_attrs: int, rows: Sequence[tuple[str, Iterable[int]]]) -> str:
    lines = [ATTRIBUTES_MAGIC, str(n_attrs)]
    for image_id, attrs in rows:
        attrs = sorted(attrs)
        lines.append(" ".join([image_id, str(len(attrs))] + [str(a) for a in attrs]))
    return "\n".join(lines) + "\n"


def parse_sizes(text: str) -> dict[str, tuple[float, float]]:
    """``SIZES v1`` file with header ``2`` and rows ``<id> <width> <height>``."""
    out = {}
    for image_id, v in parse_vectors(text, SIZES_MAGIC, 2):
        if not (v[0] > 0 and v[1] > 0):
            raise ValueError(f"{image_id}: image size must be positive, got {v.tolist()}")
        out[image_id] = (float(v[0]), float(v[1]))
    return out


# --- crop / resize -----------------------------------------------------------

@dataclass(frozen=True)
class BBox:
    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        if not (self.x2 > self.x1 and self.y2 > self.y1):
            raise ValueError(f"degenerate box ({self.x1}, {self.y1}, {self.x2}, {self.y2})")


def parse_bboxes(text: str) -> dict[str, BBox]:
    """``BBOXES v1`` file with header ``4`` and rows ``<id> <x1> <y1> <x2> <y2>``."""
    out = {}
    for image_id, v in parse_vectors(text, BBOXES_MAGIC, 4):
        try:
            out[image_id] = BBox(*v.tolist())
        except ValueError as e:
            raise ValueError(f"{image_id}: {e}") from None
    return out


class TransformedPoint(NamedTuple):
    x: float
    y: float
    outside: bool


def bbox_transform(p: Sequence[float], box: BBox, target: float) -> TransformedPoint:
    """Map an image point into the ``target x target`` resized crop of ``box``.

    Points outside the box land outside ``[0, target)`` and are flagged, not clamped.
    """
    if not target >= 1:
        raise ValueError(f"target size must be >= 1, got {target}")
    x = (p[0] - box.x1) * target / (box.x2 - box.x1)
    y = (p[1] - box.y1) * target / (box.y2 - box.y1)
    return TransformedPoint(x, y, not (0 <= x < target and 0 <= y < target))


def transform_landmarks(lm: LandmarkSet, box: BBox, target: float) -> tuple[LandmarkSet, list[int]]:
    """Apply :func:`bbox_transform` to every non-missing landmark.

    Returns the moved set and the indices that fell outside the crop.
    """
    pts, outside = [], []
    for i, p in enumerate(lm.points):
        if p.visibility == Visibility.MISSING:
            pts.append(p)
            continue
        t = bbox_transform((p.x, p.y), box, target)
        if t.outside:
            outside.append(i)
        pts.append(Landmark(t.x, t.y, p.visibility))
    return LandmarkSet(lm.image_id, tuple(pts)), outside


def landmark_truths(sets: Sequence[LandmarkSet], sizes: dict[str, tuple[float, float]]) -> list[GroundTruth]:
    """Attach image sizes to landmark sets for normalized-error evaluation."""
    out = []
    for s in sets:
        if s.image_id not in sizes:
            raise KeyError(s.image_id)
        w, h = sizes[s.image_id]
        out.append(GroundTruth(s.image_id, landmarks=s, image_width=w, image_height=h))
    return out


def landmark_records(sets: Sequence[LandmarkSet]) -> list[ScoreRecord]:
    """Treat a landmark file as predictions; visibility flags are ignored."""
    return [ScoreRecord(s.image_id, predicted_landmarks=tuple((p.x, p.y) for p in s.points)) for s in sets]
