"""Heuristic ordering baselines: lower-in-image wins, bigger wins.

Both share the detector's first two gates (boxes intersect, both masks
present in the intersection) to decide whether a pair interacts at all,
and only differ in how they pick the occluder.
"""

from __future__ import annotations

from typing import Literal, Sequence

import numpy as np

from .detector import Instance, _check_extents, _collide, pairwise_matrix
from .raster import count_in, crop, intersection

__all__ = ["candidate_pair", "yaxis_matrix", "area_matrix"]

Gate = Literal["box", "mask", "collision"]


def candidate_pair(a: Instance, b: Instance, gate: Gate = "mask") -> bool:
    """Whether a baseline should order ``a`` and ``b`` at all.

    ``box``: bounding boxes intersect. ``mask`` (default): additionally
    both masks have pixels inside the intersection. ``collision``: also
    require the masks to touch there (8-neighbourhood), like the detector.
    """
    _check_extents(a, b)
    ia = intersection(a.bbox, b.bbox)
    if ia is None:
        return False
    if gate == "box":
        return True
    if count_in(a.mask, ia) == 0 or count_in(b.mask, ia) == 0:
        return False
    if gate == "collision":
        return _collide(crop(a.mask, ia), crop(b.mask, ia), "adjacent8")
    return True


def _by_score(score_a, score_b) -> int:
    if score_a > score_b:
        return 1
    if score_a < score_b:
        return -1
    return 0


def _y_score(inst: Instance, mode: str) -> float:
    if mode == "bottom":
        return inst.bbox.y_max
    if mode == "centroid":
        rows = np.nonzero(inst.mask)[0]
        if rows.size == 0:
            return (inst.bbox.y_min + inst.bbox.y_max) / 2
        return float(rows.mean())
    raise ValueError(f"unknown y mode {mode!r}")


def yaxis_matrix(
    instances: Sequence[Instance],
    y_mode: Literal["bottom", "centroid"] = "bottom",
    gate: Gate = "mask",
    jobs: int = 1,
) -> np.ndarray:
    """The instance lower in the image (larger row) occludes; ties stay unordered."""
    scores = {inst.id: _y_score(inst, y_mode) for inst in instances}

    def relate(a, b):
        if not candidate_pair(a, b, gate):
            return 0
        return _by_score(scores[a.id], scores[b.id])

    return pairwise_matrix(instances, relate, jobs)


def area_matrix(
    instances: Sequence[Instance],
    measure: Literal["mask", "bbox"] = "mask",
    gate: Gate = "mask",
    jobs: int = 1,
) -> np.ndarray:
    """The bigger instance occludes; ties stay unordered.

    Size is the modal mask population, or the box area with
    ``measure="bbox"``.
    """
    if measure == "mask":
        sizes = {inst.id: inst.population for inst in instances}
    elif measure == "bbox":
        sizes = {inst.id: inst.bbox.area for inst in instances}
    else:
        raise ValueError(f"unknown size measure {measure!r}")

    def relate(a, b):
        if not candidate_pair(a, b, gate):
            return 0
        return _by_score(sizes[a.id], sizes[b.id])

    return pairwise_matrix(instances, relate, jobs)
