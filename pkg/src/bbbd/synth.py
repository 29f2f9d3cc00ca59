"""Synthetic layered scenes with exact ground truth.

Shapes are listed front to back: index 0 is nearest. Each shape is
rasterized on its own (its amodal mask), and the visible (modal) mask
of shape k is what remains after removing every nearer shape, which is
the painter's algorithm run in reverse. The true order comes straight
from the list position, never from anything the detector computes.

Randomness uses :class:`random.Random` (Mersenne Twister) and only its
``random()`` stream, whose output is fixed across Python versions and
platforms, so seeded suites are byte-reproducible.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .detector import Instance
from .errors import InfeasibleConstraints
from .evaluation import GroundTruth
from .raster import BBox, rasterize_polygon, tight_bbox
from .scene import Scene

__all__ = [
    "Shape",
    "SceneSpec",
    "render_amodal",
    "render_modal",
    "oracle_order",
    "to_scene",
    "overlap_ratio",
    "generate_random",
]

KINDS = ("disc", "ellipse", "diamond", "polygon", "rectangle")
DEFAULT_KINDS = ("disc", "ellipse", "diamond", "polygon")


@dataclass(frozen=True)
class Shape:
    """A filled parametric shape in pixel units.

    ``radii`` are the half-extents along the shape's own axes (a disc uses
    ``rx``), ``angle`` rotates ellipses in radians, and ``vertices`` holds
    the ``(x, y)`` corners of a polygon.
    """

    kind: str
    center: tuple[float, float] = (0.0, 0.0)
    radii: tuple[float, float] = (1.0, 1.0)
    angle: float = 0.0
    vertices: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}")

    @classmethod
    def disc(cls, cx, cy, r):
        return cls("disc", (cx, cy), (r, r))

    @classmethod
    def ellipse(cls, cx, cy, rx, ry, angle=0.0):
        return cls("ellipse", (cx, cy), (rx, ry), angle)

    @classmethod
    def diamond(cls, cx, cy, rx, ry):
        return cls("diamond", (cx, cy), (rx, ry))

    @classmethod
    def rectangle(cls, cx, cy, rx, ry):
        return cls("rectangle", (cx, cy), (rx, ry))

    @classmethod
    def polygon(cls, vertices):
        vs = tuple((float(x), float(y)) for x, y in vertices)
        cx = sum(v[0] for v in vs) / len(vs)
        cy = sum(v[1] for v in vs) / len(vs)
        return cls("polygon", (cx, cy), vertices=vs)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "center": list(self.center), "radii": list(self.radii)}
        if self.angle:
            d["angle"] = self.angle
        if self.vertices:
            d["vertices"] = [list(v) for v in self.vertices]
        return d

    def rasterize(self, width: int, height: int) -> np.ndarray:
        if self.kind == "polygon":
            return rasterize_polygon(self.vertices, width, height)

        out = np.zeros((height, width), dtype=bool)
        cx, cy = self.center
        reach = math.hypot(*self.radii) if self.kind == "ellipse" else max(self.radii)
        x0, x1 = max(int(cx - reach) - 1, 0), min(int(cx + reach) + 2, width)
        y0, y1 = max(int(cy - reach) - 1, 0), min(int(cy + reach) + 2, height)
        if x0 >= x1 or y0 >= y1:
            return out
        dy, dx = np.mgrid[y0:y1, x0:x1].astype(np.float64)
        dx += 0.5 - cx
        dy += 0.5 - cy
        rx, ry = self.radii
        if self.kind in ("disc", "ellipse"):
            c, s = math.cos(self.angle), math.sin(self.angle)
            u, v = dx * c + dy * s, -dx * s + dy * c
            inside = (u / rx) ** 2 + (v / ry) ** 2 <= 1.0
        elif self.kind == "diamond":
            inside = np.abs(dx) / rx + np.abs(dy) / ry <= 1.0
        else:
            inside = (np.abs(dx) <= rx) & (np.abs(dy) <= ry)
        out[y0:y1, x0:x1] = inside
        return out


@dataclass(frozen=True)
class SceneSpec:
    width: int
    height: int
    shapes: tuple[Shape, ...] = ()
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "seed": self.seed,
            "shapes": [s.to_dict() for s in self.shapes],
        }


def render_amodal(spec: SceneSpec) -> list[np.ndarray]:
    return [s.rasterize(spec.width, spec.height) for s in spec.shapes]


def _modal(amodal: Sequence[np.ndarray], shape) -> list[np.ndarray]:
    covered = np.zeros(shape, dtype=bool)
    modal = []
    for a in amodal:
        modal.append(a & ~covered)
        covered |= a
    return modal


def render_modal(spec: SceneSpec) -> list[Instance]:
    """One instance per shape, id = depth rank.

    Fully hidden shapes are kept with ``flags["fully_occluded"]`` set;
    since an empty mask has no tight box they carry their amodal box.
    """
    amodal = render_amodal(spec)
    modal = _modal(amodal, (spec.height, spec.width))
    instances = []
    for k, (a, m) in enumerate(zip(amodal, modal)):
        box = tight_bbox(m)
        hidden = box is None
        if hidden:
            box = tight_bbox(a)
        instances.append(
            Instance(
                id=k,
                bbox=box,
                mask=m,
                category=spec.shapes[k].kind,
                flags={"depth": k, "fully_occluded": hidden},
            )
        )
    return instances


def oracle_order(spec: SceneSpec) -> tuple[np.ndarray, np.ndarray]:
    """True order matrix and occlusion labels from the depth ranks.

    ``cells[i, j] = 1`` when shape i is nearer than j and their full
    extents overlap. A shape is occluded when any of it is hidden.
    """
    amodal = render_amodal(spec)
    n = len(amodal)
    cells = np.zeros((n, n), dtype=np.int8)
    for i in range(n):
        for j in range(i + 1, n):
            if np.logical_and(amodal[i], amodal[j]).any():
                cells[i, j], cells[j, i] = 1, -1
    modal = _modal(amodal, (spec.height, spec.width))
    occluded = np.array([not np.array_equal(a, m) for a, m in zip(amodal, modal)], dtype=bool)
    return cells, occluded


def to_scene(spec: SceneSpec, image_id=0) -> Scene:
    """Rendered instances plus oracle ground truth, ready for evaluation or saving."""
    instances = render_modal(spec)
    cells, occluded = oracle_order(spec)
    amodal_area = np.array([s.rasterize(spec.width, spec.height).sum() for s in spec.shapes])
    modal_area = np.array([inst.population for inst in instances])
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(amodal_area > 0, 1.0 - modal_area / np.maximum(amodal_area, 1), 0.0)
    gt = GroundTruth(cells, occluded, ratio)
    return Scene(image_id, spec.width, spec.height, instances, gt)


def overlap_ratio(a: np.ndarray, b: np.ndarray) -> float:
    """``|a & b| / min(|a|, |b|)``."""
    denom = min(int(a.sum()), int(b.sum()))
    if denom == 0:
        return 0.0
    return int(np.logical_and(a, b).sum()) / denom


def _random_shape(rng: random.Random, kind, width, height, size_range) -> Shape:
    lo, hi = size_range

    def radius():
        return lo + (hi - lo) * rng.random()

    rx, ry = radius(), radius()
    reach = max(rx, ry)
    cx = reach + (width - 2 * reach) * rng.random() if width > 2 * reach else width / 2
    cy = reach + (height - 2 * reach) * rng.random() if height > 2 * reach else height / 2
    if kind == "disc":
        return Shape.disc(cx, cy, rx)
    if kind == "ellipse":
        return Shape.ellipse(cx, cy, rx, ry, math.pi * rng.random())
    if kind == "diamond":
        return Shape.diamond(cx, cy, rx, ry)
    if kind == "rectangle":
        return Shape.rectangle(cx, cy, rx, ry)
    # points on a rotated ellipse, taken in angular order, form a convex polygon
    n = 3 + int(5 * rng.random())
    rot = 2 * math.pi * rng.random()
    angles = sorted(2 * math.pi * rng.random() for _ in range(n))
    verts = [
        (
            cx + rx * math.cos(t) * math.cos(rot) - ry * math.sin(t) * math.sin(rot),
            cy + rx * math.cos(t) * math.sin(rot) + ry * math.sin(t) * math.cos(rot),
        )
        for t in angles
    ]
    return Shape.polygon(verts)


def _generate_one(
    seed, width, height, n_shapes, overlap_range, size_range, kinds, min_area, budget
) -> SceneSpec:
    rng = random.Random(seed)
    lo, hi = overlap_range
    for _ in range(budget):
        target = n_shapes[0] + int((n_shapes[1] - n_shapes[0] + 1) * rng.random())
        shapes, masks = [], []
        for _ in range(target):
            for _ in range(budget):
                kind = kinds[int(len(kinds) * rng.random())]
                shape = _random_shape(rng, kind, width, height, size_range)
                mask = shape.rasterize(width, height)
                if mask.sum() < min_area:
                    continue
                if all(lo <= overlap_ratio(mask, m) <= hi for m in masks):
                    shapes.append(shape)
                    masks.append(mask)
                    break
            else:
                break
        if len(shapes) == target:
            return SceneSpec(width, height, tuple(shapes), seed)
    raise InfeasibleConstraints(
        f"could not place {n_shapes} shapes with overlap in {overlap_range} "
        f"after {budget} attempts (seed {seed})"
    )


def generate_random(
    seed: int,
    count: int,
    overlap_range: tuple[float, float] = (0.0, 1.0),
    size_range: tuple[float, float] = (4.0, 16.0),
    n_shapes: tuple[int, int] = (2, 2),
    width: int = 64,
    height: int = 64,
    kinds: Sequence[str] = DEFAULT_KINDS,
    min_area: int = 4,
    budget: int = 200,
) -> list[SceneSpec]:
    """Seeded random scenes.

    Every pair of shapes in a scene has an overlap ratio (see
    :func:`overlap_ratio`) inside ``overlap_range``. Shape half-extents are
    drawn from ``size_range`` and the shape count from the inclusive
    ``n_shapes`` range. Each scene gets its own sub-seed, recorded on the
    spec, so any single scene can be regenerated on its own.
    """
    lo, hi = overlap_range
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError(f"bad overlap range {overlap_range}")
    if not 0 < size_range[0] <= size_range[1]:
        raise ValueError(f"bad size range {size_range}")
    if not 1 <= n_shapes[0] <= n_shapes[1]:
        raise ValueError(f"bad shape-count range {n_shapes}")
    unknown = set(kinds) - set(KINDS)
    if unknown or not kinds:
        raise ValueError(f"bad shape kinds {kinds}")

    master = random.Random(seed)
    sub_seeds = [int(master.random() * 2**32) for _ in range(count)]
    return [
        _generate_one(
            s, width, height, n_shapes, overlap_range, size_range, tuple(kinds), min_area, budget
        )
        for s in sub_seeds
    ]
