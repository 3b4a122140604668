import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from battn.attention import LandmarkSet, Visibility
from battn.ingest import (
    BBox,
    ParseError,
    bbox_transform,
    format_attributes,
    format_categories,
    format_landmarks,
    format_scores,
    parse_attributes,
    parse_bboxes,
    parse_categories,
    parse_deepfashion_landmarks,
    parse_landmarks,
    parse_scores,
    parse_sizes,
    transform_landmarks,
)

HEADER = "LANDMARKS v1\n8\n"


def test_parse_landmark_row():
    (lm,) = parse_landmarks(HEADER + "img_001 2 0 10 20 0 30 40\n")
    assert lm.image_id == "img_001"
    assert lm.points == ((10.0, 20.0, Visibility.VISIBLE), (30.0, 40.0, Visibility.VISIBLE))


def test_parse_missing_landmark():
    (lm,) = parse_landmarks(HEADER + "a 2 2 0 0 1 5.5 6\n")
    assert lm.points[0].visibility == Visibility.MISSING
    assert lm.points[1] == (5.5, 6.0, Visibility.OCCLUDED)


def test_parse_empty_body():
    assert parse_landmarks(HEADER) == []
    assert parse_landmarks(HEADER + "\n\n") == []


@pytest.mark.parametrize("text, line, col", [
    ("LANDMARK v1\n8\n", 1, 1),
    ("LANDMARKS v1\nx\n", 2, 1),
    (HEADER + "a 2 0 1 2 0 3\n", 3, 14),
    (HEADER + "a 1 0 1 2 9\n", 3, 11),
    (HEADER + "a 1 0 1 zz\n", 3, 9),
    (HEADER + "a 1 3 1 2\n", 3, 5),
    (HEADER + "a 9 " + "0 1 1 " * 9 + "\n", 3, 3),
    (HEADER + "a 0\nb 0\na 0\n", 5, 1),
    ("LANDMARKS v1\r\n8\r\n", 1, 0),
])
def test_parse_errors_point_at_line_and_column(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_landmarks(text)
    assert info.value.line == line
    assert info.value.column == col
    assert f"line {line}" in str(info.value)


def test_parse_scores():
    (rec,) = parse_scores("SCORES v1\n2\nimg_001 0.1 0.9\n", 2)
    np.testing.assert_array_equal(rec.category_scores, [0.1, 0.9])
    (rec,) = parse_scores("SCORES v1\n2\nx 1e-3 -2E+1\n", kind="attribute")
    np.testing.assert_array_equal(rec.attribute_scores, [0.001, -20.0])


def test_parse_scores_length_error_names_row():
    with pytest.raises(ParseError, match="img_007"):
        parse_scores("SCORES v1\n2\nimg_007 0.1 0.2 0.3\n", 2)
    with pytest.raises(ParseError, match="expected 3"):
        parse_scores("SCORES v1\n2\na 1 2\n", 3)
    with pytest.raises(ParseError):
        parse_scores("SCORES v1\n1\na nan\n")


def test_parse_ground_truth_files():
    n, gts = parse_categories("CATEGORIES v1\n5\na 0\nb 4\n")
    assert n == 5 and [g.category for g in gts] == [0, 4]
    with pytest.raises(ParseError):
        parse_categories("CATEGORIES v1\n5\na 5\n")
    n, gts = parse_attributes("ATTRIBUTES v1\n10\na 2 3 7\nb 0\n")
    assert n == 10 and gts[0].attributes == {3, 7} and gts[1].attributes == frozenset()
    with pytest.raises(ParseError):
        parse_attributes("ATTRIBUTES v1\n10\na 2 3\n")


def test_parse_sizes_and_boxes():
    assert parse_sizes("SIZES v1\n2\na 300 200\n") == {"a": (300.0, 200.0)}
    assert parse_bboxes("BBOXES v1\n4\na 1 2 3 4\n") == {"a": BBox(1, 2, 3, 4)}
    with pytest.raises(ValueError):
        parse_bboxes("BBOXES v1\n4\na 1 2 1 4\n")


def test_deepfashion_adapter():
    text = (
        "2\n"
        "image_name clothes_type variation_type landmark_visibility_1 landmark_location_x_1 landmark_location_y_1\n"
        "img/Sheer_Pleated/img_00000001.jpg 3 1 0 146 102 0 173 095 2 000 000 0 162 124\n"
        "img/Tee/img_00000002.jpg 1 1 1 50 60 0 70 80\n"
    )
    a, b = parse_deepfashion_landmarks(text)
    assert a.image_id == "img/Sheer_Pleated/img_00000001.jpg"
    assert len(a.points) == 4 and a.points[1] == (173.0, 95.0, Visibility.VISIBLE)
    assert a.points[2].visibility == Visibility.MISSING
    assert b.points[0].visibility == Visibility.OCCLUDED
    with pytest.raises(ParseError) as info:
        parse_deepfashion_landmarks(text + "bad 1 1 0 5\n")
    assert info.value.line == 5


def test_bbox_transform_examples():
    box = BBox(10, 20, 110, 220)
    assert bbox_transform((10, 20), box, 224)[:2] == (0.0, 0.0)
    t = bbox_transform((110, 220), box, 224)
    assert t[:2] == (224.0, 224.0) and t.outside
    t = bbox_transform((60, 120), box, 224)
    assert t[:2] == (112.0, 112.0) and not t.outside
    assert bbox_transform((0, 0), box, 224).outside
    with pytest.raises(ValueError):
        BBox(0, 0, 0, 5)
    with pytest.raises(ValueError):
        bbox_transform((0, 0), box, 0)


def test_transform_then_rescale_equals_direct():
    box = BBox(13.5, 7.25, 301.0, 410.0)
    rng = np.random.default_rng(0)
    for p in rng.uniform(0, 400, (50, 2)):
        a = bbox_transform(p, box, 256)
        b = bbox_transform(p, box, 224)
        assert abs(a.x * 224 / 256 - b.x) < 1e-9 and abs(a.y * 224 / 256 - b.y) < 1e-9


def test_transform_is_affine():
    box = BBox(5, 5, 85, 45)
    p, q = (12.0, 30.0), (70.0, 8.0)
    mid = bbox_transform(((p[0] + q[0]) / 2, (p[1] + q[1]) / 2), box, 256)
    a, b = bbox_transform(p, box, 256), bbox_transform(q, box, 256)
    assert mid.x == pytest.approx((a.x + b.x) / 2) and mid.y == pytest.approx((a.y + b.y) / 2)


def test_transform_landmarks_flags_outside():
    lm = LandmarkSet("a", ((50, 50, 0), (0, 0, 1), (999, 999, 2)))
    moved, outside = transform_landmarks(lm, BBox(10, 10, 110, 110), 256)
    assert outside == [1]
    assert moved.points[0][:2] == (102.4, 102.4)
    assert moved.points[2] == lm.points[2]


real = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
ident = st.text("abcdefghij_0123456789/.-", min_size=1, max_size=12)


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(ident, st.lists(st.tuples(real, real, st.integers(0, 2)), max_size=8), max_size=6))
def test_landmark_round_trip(rows):
    sets = [LandmarkSet(k, tuple(v)) for k, v in rows.items()]
    assert parse_landmarks(format_landmarks(sets, 8)) == sets


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.dictionaries(ident, st.lists(real, min_size=n, max_size=n), max_size=6)))
def test_score_round_trip(rows):
    items = list(rows.items())
    text = format_scores(items)
    parsed = parse_scores(text, kind="attribute")
    assert [r.image_id for r in parsed] == [k for k, _ in items]
    for r, (_, v) in zip(parsed, items):
        assert r.attribute_scores.tolist() == v


def test_ground_truth_round_trip():
    cats = [("a", 1), ("b", 0)]
    _, gts = parse_categories(format_categories(3, cats))
    assert [(g.image_id, g.category) for g in gts] == cats
    attrs = [("a", {4, 1}), ("b", set())]
    _, gts = parse_attributes(format_attributes(6, attrs))
    assert [(g.image_id, set(g.attributes)) for g in gts] == attrs
