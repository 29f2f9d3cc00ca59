"""
Deciding occlusion for a pair of instances
==========================================

Two shapes are drawn front to back, the visible masks are cut out, and
the detector is asked who is in front.
"""

import numpy as np

from bbbd import BbbdConfig, classify_pair
from bbbd.raster import count_in, intersection
from bbbd.synth import SceneSpec, Shape, render_modal

# a disc partly covering an ellipse; index 0 is the nearer shape
spec = SceneSpec(48, 48, (Shape.disc(18, 20, 9), Shape.ellipse(28, 24, 12, 7, 0.4)))
near, far = render_modal(spec)

# everything the detector looks at lives inside the box intersection
window = intersection(near.bbox, far.bbox)
print("boxes:", near.bbox, far.bbox)
print("window:", window)
print("pixels in window: near", count_in(near.mask, window), "far", count_in(far.mask, window))

verdict = classify_pair(near, far)
print("verdict:", verdict.name)

# the contact test can be switched off to see what it filters
print("without contact test:", classify_pair(near, far, BbbdConfig(collision_rule="none")).name)

# picture of the scene: 1 = near, 2 = far
canvas = near.mask.astype(int) + 2 * far.mask.astype(int)
for row in canvas[8:36]:
    print("".join(".12"[v] for v in row[4:46]))

# two boxes that do not share a pixel never relate
apart = SceneSpec(48, 48, (Shape.disc(8, 8, 5), Shape.disc(38, 38, 5)))
print("far apart:", classify_pair(*render_modal(apart)).name)
