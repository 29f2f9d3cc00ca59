import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbbd.errors import DegeneratePolygon, ExtentMismatch, LengthMismatch
from bbbd.raster import (
    BBox,
    bbox_from_float,
    contains,
    count_in,
    decode_rle,
    dilate8,
    encode_rle,
    intersection,
    masks_intersect,
    rasterize_polygon,
    tight_bbox,
)

from oracles import (
    box_pixels,
    count_oracle,
    decode_oracle,
    dilate_oracle,
    pixels_to_box,
    polygon_oracle,
)

boxes = st.builds(
    lambda x0, y0, w, h: BBox(x0, y0, x0 + w, y0 + h),
    st.integers(0, 20),
    st.integers(0, 20),
    st.integers(0, 10),
    st.integers(0, 10),
)


def masks(max_side=12):
    return st.tuples(st.integers(1, max_side), st.integers(1, max_side), st.integers(0, 2**32 - 1)).map(
        lambda t: np.random.default_rng(t[2]).random((t[1], t[0])) < 0.4
    )


class TestBoxes:
    def test_disjoint(self):
        assert intersection(BBox(0, 0, 4, 7), BBox(10, 0, 14, 7)) is None

    def test_identity(self):
        assert intersection(BBox(0, 0, 9, 9), BBox(0, 0, 9, 9)) == BBox(0, 0, 9, 9)

    def test_partial_matches_pixel_oracle(self):
        a, b = BBox(1, 1, 6, 6), BBox(4, 3, 9, 9)
        expected = pixels_to_box(box_pixels(a) & box_pixels(b))
        assert expected == (4, 3, 6, 6)
        assert intersection(a, b) == BBox(*expected)

    def test_shared_edge_column_intersects(self):
        assert intersection(BBox(0, 0, 4, 4), BBox(4, 0, 8, 4)) == BBox(4, 0, 4, 4)
        assert intersection(BBox(0, 0, 4, 4), BBox(5, 0, 8, 4)) is None

    @given(boxes, boxes)
    def test_intersection_matches_pixels(self, a, b):
        got = intersection(a, b)
        assert box_pixels(got) == box_pixels(a) & box_pixels(b)
        assert got == intersection(b, a)
        assert intersection(a, a) == a

    def test_contains(self):
        assert contains(BBox(0, 0, 9, 9), BBox(2, 2, 5, 5))
        assert contains(BBox(0, 0, 9, 9), BBox(0, 0, 9, 9))
        outer, inner = BBox(2, 2, 5, 5), BBox(0, 0, 9, 9)
        assert not box_pixels(inner) <= box_pixels(outer)
        assert not contains(outer, inner)

    @given(boxes, boxes)
    def test_contains_matches_pixels(self, a, b):
        assert contains(a, b) == (box_pixels(b) <= box_pixels(a))
        if contains(a, b) and contains(b, a):
            assert a == b

    def test_from_float(self):
        assert bbox_from_float(1.2, 0.0, 4.0, 3.5, 10, 10) == BBox(1, 0, 3, 3)
        assert bbox_from_float(-3, -3, 20, 20, 10, 8) == BBox(0, 0, 9, 7)
        assert bbox_from_float(2.0, 2.0, 2.0, 5.0, 10, 10) is None


class TestRle:
    def test_leading_zero_run(self):
        assert decode_rle([0, 6], 2, 3).all()

    def test_single_background_run(self):
        assert not decode_rle([6], 2, 3).any()

    def test_hand_expanded(self):
        m = decode_rle([1, 2, 3], 2, 3)
        expected = decode_oracle([1, 2, 3], 2, 3)
        # column-major positions 1 and 2 are rows 1 and 2 of column 0
        assert expected[1, 0] and expected[2, 0] and expected.sum() == 2
        np.testing.assert_array_equal(m, expected)
        assert encode_rle(m) == [1, 2, 3]

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            decode_rle([1, 2], 2, 3)
        with pytest.raises(LengthMismatch):
            decode_rle([-1, 7], 2, 3)

    def test_encode_constant(self):
        assert encode_rle(np.zeros((4, 4), bool)) == [16]
        assert encode_rle(np.ones((4, 4), bool)) == [0, 16]

    @given(masks())
    def test_round_trip(self, m):
        counts = encode_rle(m)
        assert sum(counts) == m.size
        assert all(c > 0 for c in counts[1:])
        back = decode_rle(counts, m.shape[1], m.shape[0])
        np.testing.assert_array_equal(back, m)
        np.testing.assert_array_equal(decode_oracle(counts, m.shape[1], m.shape[0]), m)

    @given(st.lists(st.integers(1, 6), min_size=1, max_size=8), st.booleans())
    def test_encode_inverts_canonical_decode(self, runs, lead_zero):
        counts = ([0] if lead_zero else []) + runs
        total = sum(counts)
        assert encode_rle(decode_rle(counts, 1, total)) == counts


class TestPolygon:
    def test_square(self):
        pts = [(0, 0), (4, 0), (4, 4), (0, 4)]
        m = rasterize_polygon(pts, 8, 8)
        expected = polygon_oracle(pts, 8, 8)
        assert expected.sum() == 16
        np.testing.assert_array_equal(m, expected)

    def test_outside_extent(self):
        assert not rasterize_polygon([(20, 20), (30, 20), (25, 30)], 8, 8).any()
        assert not rasterize_polygon([(-9, -9), (-2, -9), (-5, -2)], 8, 8).any()

    def test_degenerate(self):
        with pytest.raises(DegeneratePolygon):
            rasterize_polygon([(0, 0), (1, 1)], 4, 4)

    def test_self_intersecting_even_odd(self):
        # a pentagram leaves its centre pentagon unfilled under even-odd
        import math

        pts = [
            (16 + 14 * math.cos(math.pi / 2 + k * 4 * math.pi / 5),
             16 - 14 * math.sin(math.pi / 2 + k * 4 * math.pi / 5))
            for k in range(5)
        ]
        m = rasterize_polygon(pts, 32, 32)
        np.testing.assert_array_equal(m, polygon_oracle(pts, 32, 32))
        assert not m[16, 16]

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(
            st.tuples(st.floats(-4, 28, allow_nan=False), st.floats(-4, 28, allow_nan=False)),
            min_size=3,
            max_size=9,
        )
    )
    def test_matches_oracle(self, pts):
        np.testing.assert_array_equal(rasterize_polygon(pts, 24, 24), polygon_oracle(pts, 24, 24))


class TestCounting:
    def test_empty_rect(self):
        assert count_in(np.ones((6, 6), bool), None) == 0

    def test_window_area(self):
        assert count_in(np.ones((6, 6), bool), BBox(1, 1, 4, 4)) == 16

    @given(masks(), boxes)
    def test_matches_naive(self, m, box):
        assert count_in(m, box) == count_oracle(m, box)
        h, w = m.shape
        assert count_in(m, intersection(box, BBox(0, 0, w - 1, h - 1))) == count_in(m, box)

    @given(masks())
    def test_full_extent_is_population(self, m):
        h, w = m.shape
        assert count_in(m, BBox(0, 0, w - 1, h - 1)) == m.sum()


class TestDilate:
    def test_empty(self):
        assert not dilate8(np.zeros((5, 5), bool)).any()

    def test_single_pixel(self):
        m = np.zeros((5, 5), bool)
        m[2, 2] = True
        d = dilate8(m)
        assert d.sum() == 9 and d[1:4, 1:4].all()

    def test_border_clamps(self):
        m = np.zeros((4, 4), bool)
        m[0, 0] = True
        d = dilate8(m)
        assert d.sum() == 4 and not d[3, 3]

    @given(masks())
    def test_matches_oracle(self, m):
        d = dilate8(m)
        np.testing.assert_array_equal(d, dilate_oracle(m))
        assert (d | m).sum() == d.sum()


class TestIntersectAndTightBox:
    def test_vs_empty(self):
        m = np.eye(4, dtype=bool)
        assert not masks_intersect(m, np.zeros_like(m))
        assert masks_intersect(m, m)

    def test_extent_mismatch(self):
        with pytest.raises(ExtentMismatch):
            masks_intersect(np.zeros((2, 2), bool), np.zeros((3, 2), bool))

    @given(masks(8), st.integers(0, 2**32 - 1))
    def test_random(self, a, seed):
        b = np.random.default_rng(seed).random(a.shape) < 0.3
        assert masks_intersect(a, b) == (np.logical_and(a, b).sum() > 0)

    def test_tight_box(self):
        assert tight_bbox(np.zeros((6, 6), bool)) is None
        m = np.zeros((8, 8), bool)
        m[5, 3] = True
        assert tight_bbox(m) == BBox(3, 5, 3, 5)

    @given(masks())
    def test_tight_box_matches_coordinates(self, m):
        pixels = {(c, r) for r, c in zip(*np.nonzero(m))}
        expected = pixels_to_box(pixels)
        got = tight_bbox(m)
        assert (got is None and expected is None) or tuple(got) == expected
