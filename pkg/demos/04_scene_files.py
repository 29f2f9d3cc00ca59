"""
Scene files and COCOA annotations
=================================

Scenes travel as canonical JSON. A COCOA-style annotation (regions with a
depth layer, an occlusion rate and, when hidden in part, a visible mask)
converts into the same format.
"""

import json

import numpy as np

from bbbd import build_order_matrix, convert_cocoa, evaluate
from bbbd.ingest import loads_scene, save_scene
from bbbd.raster import encode_rle, rasterize_polygon
from bbbd.synth import generate_random, to_scene

# synthetic scene -> bytes -> scene
(spec,) = generate_random(seed=3, count=1, n_shapes=(3, 3))
scene = to_scene(spec, image_id="synthetic-3")
data = save_scene(scene)
print(data[:160].decode(), "...")
again = loads_scene(data)
assert save_scene(again) == data

# a hand-made COCOA fragment: a square in front of another square
W = H = 24
front = [2, 2, 12, 2, 12, 12, 2, 12]
back = [7, 7, 20, 7, 20, 20, 7, 20]


def poly(flat):
    return rasterize_polygon(np.reshape(flat, (-1, 2)), W, H)


visible = poly(back) & ~poly(front)
annotation = {
    "images": [{"id": 1, "width": W, "height": H}],
    "annotations": [
        {
            "image_id": 1,
            "regions": [
                {"segmentation": front, "order": 1, "occlude_rate": 0.0, "name": "box"},
                {
                    "segmentation": back,
                    "order": 2,
                    "occlude_rate": float(1 - visible.sum() / poly(back).sum()),
                    "name": "crate",
                    "visible_mask": {"counts": encode_rle(visible), "size": [H, W]},
                },
            ],
        }
    ],
}
(converted,) = convert_cocoa(annotation)
print(json.loads(save_scene(converted))["gt"])

# squares are a blind spot: the front square fills the whole box
# intersection, the back one has no visible pixels there, so no relation
pred = build_order_matrix(converted.instances)
print(pred.tolist())
print(evaluate(pred, converted.gt).to_dict())
