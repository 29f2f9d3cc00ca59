"""Hand-built two-instance scenes, one per geometric case the detector handles.

Each builder returns ``(a, b, expected, reason)`` where ``expected`` is the
verdict for ``classify_pair(a, b)`` and ``reason`` names the deciding step.
"""

import numpy as np

from bbbd.detector import Relation
from bbbd.raster import BBox
from bbbd.synth import SceneSpec, Shape, render_modal

from oracles import instance, mask_from_pixels

W = H = 16


def disjoint_boxes():
    a = mask_from_pixels([(x, y) for x in range(0, 5) for y in range(0, 8)], W, H)
    b = mask_from_pixels([(x, y) for x in range(10, 15) for y in range(0, 8)], W, H)
    return instance(0, a), instance(1, b), Relation.NO_RELATION, "empty-ia"


def box_overlap_without_mask():
    # an L-shaped mask whose box reaches into the other box with no pixels
    a_px = [(x, y) for x in (0, 1) for y in range(10)] + [(x, y) for x in range(10) for y in (8, 9)]
    b_px = [(x, y) for x in range(7, 13) for y in range(0, 5)]
    return (
        instance(0, mask_from_pixels(a_px, W, H)),
        instance(1, mask_from_pixels(b_px, W, H)),
        Relation.NO_RELATION,
        "zero-count",
    )


def masks_do_not_collide():
    a_px = [(x, 0) for x in range(10)] + [(0, y) for y in range(10)] + [(4, 4)]
    b_px = [(x, 12) for x in range(3, 13)] + [(12, y) for y in range(3, 13)] + [(8, 8), (9, 8)]
    return (
        instance(0, mask_from_pixels(a_px, W, H)),
        instance(1, mask_from_pixels(b_px, W, H)),
        Relation.NO_RELATION,
        "no-collision",
    )


def box_inside_box():
    frame = [(x, y) for x in range(10) for y in (0, 9)] + [(x, y) for x in (0, 9) for y in range(10)]
    inner_a = [(4, 3), (5, 3), (4, 4), (5, 4), (6, 4), (4, 5), (5, 5), (6, 5)]
    b_px = [(3, 3), (3, 4), (3, 5), (3, 6), (4, 6), (5, 6), (6, 6), (6, 3)]
    big = instance(0, mask_from_pixels(frame + inner_a, W, H))
    small = instance(1, mask_from_pixels(b_px, W, H))
    assert small.bbox == BBox(3, 3, 6, 6) and big.bbox == BBox(0, 0, 9, 9)
    return big, small, Relation.SECOND_OCCLUDES_FIRST, "containment"


def larger_area_in_ia():
    spec = SceneSpec(8, 8, (Shape.diamond(3, 3, 3, 3), Shape.diamond(5, 5, 3, 3)))
    near, far = render_modal(spec)
    return near, far, Relation.FIRST_OCCLUDES_SECOND, "count"


def diagonal_gap():
    a = mask_from_pixels([(x, y) for x in range(0, 5) for y in range(0, 5)], W, H)
    b = mask_from_pixels([(x, y) for x in range(5, 10) for y in range(5, 10)], W, H)
    return instance(0, a), instance(1, b), Relation.NO_RELATION, "empty-ia"


CASES = {
    "a": disjoint_boxes,
    "b": box_overlap_without_mask,
    "c": masks_do_not_collide,
    "d": box_inside_box,
    "e": larger_area_in_ia,
    "f": diagonal_gap,
}


def filled_rectangles():
    """Near rectangle covers the whole box intersection, leaving the far one nothing there."""
    spec = SceneSpec(32, 32, (Shape.rectangle(10, 10, 6, 6), Shape.rectangle(16, 16, 8, 8)))
    return render_modal(spec)


def three_discs():
    return SceneSpec(
        64, 64, (Shape.disc(24, 24, 10), Shape.disc(32, 26, 10), Shape.disc(28, 33, 10))
    )
