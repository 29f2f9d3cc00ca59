import itertools

import numpy as np
import pytest

from bbbd.detector import build_order_matrix
from bbbd.errors import InfeasibleConstraints
from bbbd.raster import dilate8, tight_bbox
from bbbd.synth import (
    SceneSpec,
    Shape,
    generate_random,
    oracle_order,
    overlap_ratio,
    render_amodal,
    render_modal,
    to_scene,
)

from oracles import polygon_oracle


def test_single_disc_is_unoccluded():
    spec = SceneSpec(32, 32, (Shape.disc(16, 16, 6),))
    (inst,) = render_modal(spec)
    (amodal,) = render_amodal(spec)
    np.testing.assert_array_equal(inst.mask, amodal)
    assert inst.bbox == tight_bbox(amodal)


def test_identical_discs_hide_the_far_one():
    spec = SceneSpec(32, 32, (Shape.disc(16, 16, 6), Shape.disc(16, 16, 6)))
    near, far = render_modal(spec)
    assert not far.mask.any() and far.flags["fully_occluded"]
    assert far.bbox == near.bbox
    assert build_order_matrix([near, far]).sum() == 0


def test_disc_pixels_by_distance():
    d = Shape.disc(5.0, 5.0, 3.0).rasterize(10, 10)
    rows, cols = np.mgrid[0:10, 0:10]
    expected = (cols + 0.5 - 5) ** 2 + (rows + 0.5 - 5) ** 2 <= 9
    np.testing.assert_array_equal(d, expected)


def test_polygon_shape_uses_even_odd():
    verts = [(2, 3), (12, 1), (14, 10), (5, 13)]
    np.testing.assert_array_equal(Shape.polygon(verts).rasterize(16, 16), polygon_oracle(verts, 16, 16))


def test_unknown_kind():
    with pytest.raises(ValueError):
        Shape("star")


@pytest.mark.parametrize("seed", range(20))
def test_modal_set_algebra(seed):
    (spec,) = generate_random(seed, 1, n_shapes=(2, 6))
    amodal = render_amodal(spec)
    modal = [inst.mask for inst in render_modal(spec)]
    for a, b in itertools.combinations(modal, 2):
        assert not (a & b).any()
    np.testing.assert_array_equal(np.logical_or.reduce(modal), np.logical_or.reduce(amodal))
    for k, (a, m) in enumerate(zip(amodal, modal)):
        nearer = np.logical_or.reduce(amodal[:k]) if k else np.zeros_like(a)
        np.testing.assert_array_equal(m, a & ~nearer)


def test_oracle_non_overlapping():
    spec = SceneSpec(64, 64, (Shape.disc(10, 10, 5), Shape.diamond(40, 40, 6, 4)))
    cells, occluded = oracle_order(spec)
    assert not cells.any() and not occluded.any()


def test_oracle_near_over_far():
    spec = SceneSpec(64, 64, (Shape.disc(20, 20, 8), Shape.disc(28, 20, 8)))
    cells, occluded = oracle_order(spec)
    np.testing.assert_array_equal(cells, [[0, 1], [-1, 0]])
    assert occluded.tolist() == [False, True]


@pytest.mark.parametrize("seed", range(5))
def test_oracle_matches_pixel_pair_tally(seed):
    (spec,) = generate_random(seed, 1, n_shapes=(5, 5))
    amodal = render_amodal(spec)
    cells, _ = oracle_order(spec)
    n = len(amodal)
    for i in range(n):
        for j in range(n):
            pi = set(zip(*np.nonzero(amodal[i])))
            shared = any(p in pi for p in zip(*np.nonzero(amodal[j])))
            expected = 0 if i == j or not shared else (1 if i < j else -1)
            assert cells[i, j] == expected
    # depth ranks give a strict order, so "occludes" only ever points backwards
    assert not np.tril(cells == 1).any()


def test_determinism():
    assert generate_random(1, 5) == generate_random(1, 5)
    assert generate_random(1, 5) != generate_random(2, 5)
    a, b = generate_random(1, 3)[2], generate_random(1, 3)[2]
    assert a.seed == b.seed
    assert generate_random(0, 0) == []


def test_zero_overlap_range():
    for spec in generate_random(4, 20, overlap_range=(0.0, 0.0), n_shapes=(2, 4)):
        cells, occluded = oracle_order(spec)
        assert not cells.any() and not occluded.any()


def test_overlap_range_respected():
    specs = generate_random(9, 200, overlap_range=(0.1, 0.5))
    for spec in specs:
        a, b = render_amodal(spec)
        inter = int((a & b).sum())
        ratio = inter / min(int(a.sum()), int(b.sum()))
        assert 0.1 <= ratio <= 0.5
        assert ratio == overlap_ratio(a, b)


def test_partial_overlap_leaves_visible_contact():
    """With partial overlap the far shape keeps pixels touching the near one."""
    for spec in generate_random(21, 200, overlap_range=(0.1, 0.5), kinds=("disc", "ellipse", "diamond")):
        near, far = render_modal(spec)
        assert far.mask.any()
        assert (dilate8(near.mask) & far.mask).any()


def test_infeasible():
    with pytest.raises(InfeasibleConstraints):
        generate_random(0, 1, overlap_range=(0.9, 1.0), n_shapes=(8, 8), size_range=(2, 3), budget=5)


def test_bad_arguments():
    with pytest.raises(ValueError):
        generate_random(0, 1, overlap_range=(0.5, 0.1))
    with pytest.raises(ValueError):
        generate_random(0, 1, kinds=("hexagon",))


def test_to_scene_ground_truth():
    spec = SceneSpec(64, 64, (Shape.disc(20, 20, 8), Shape.disc(28, 20, 8), Shape.disc(50, 50, 5)))
    scene = to_scene(spec, image_id="s")
    assert scene.ids == [0, 1, 2]
    assert scene.gt.occluded.tolist() == [False, True, False]
    assert scene.gt.occlusion_ratio[0] == 0 and 0 < scene.gt.occlusion_ratio[1] < 1
