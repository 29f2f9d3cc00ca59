"""Training-free pairwise occlusion detector.

For every pair of instances the detector looks only at the intersection
of their bounding boxes. A pair is related when both modal masks have
pixels inside that window and the two masks touch there; the direction
then comes from box containment and, overriding it, from which instance
owns more mask pixels inside the window.
"""

from __future__ import annotations

import enum
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Hashable, Literal, Optional, Sequence

import numpy as np

from .errors import DuplicateId, ExtentMismatch
from .raster import BBox, contains, count_in, crop, dilate8, intersection

__all__ = [
    "Instance",
    "Relation",
    "BbbdConfig",
    "classify_pair",
    "build_order_matrix",
    "detect_occluded",
    "pairwise_matrix",
]

CollisionRule = Literal["adjacent8", "overlap_only", "none"]
TieBreak = Literal["leave_unordered", "larger_total_mask_wins"]


@dataclass(eq=False)
class Instance:
    """One detected object: a bounding box plus its visible (modal) mask."""

    id: Hashable
    bbox: BBox
    mask: np.ndarray
    category: Optional[str] = None
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.mask.ndim != 2:
            raise ValueError(f"instance {self.id!r}: mask must be 2-D")
        if self.bbox is None:
            raise ValueError(f"instance {self.id!r}: bbox must not be empty")
        self.bbox = BBox(*(int(v) for v in self.bbox))

    @property
    def extent(self) -> tuple[int, int]:
        """``(height, width)`` of the owning image."""
        return self.mask.shape

    @property
    def population(self) -> int:
        return int(np.count_nonzero(self.mask))


class Relation(enum.IntEnum):
    """Verdict for an ordered pair ``(a, b)``; the value is ``cells[a][b]``."""

    NO_RELATION = 0
    FIRST_OCCLUDES_SECOND = 1
    SECOND_OCCLUDES_FIRST = -1

    def mirrored(self) -> "Relation":
        return Relation(-int(self))


@dataclass(frozen=True)
class BbbdConfig:
    collision_rule: CollisionRule = "adjacent8"
    count_tie_break: TieBreak = "leave_unordered"

    def __post_init__(self):
        if self.collision_rule not in ("adjacent8", "overlap_only", "none"):
            raise ValueError(f"unknown collision rule {self.collision_rule!r}")
        if self.count_tie_break not in ("leave_unordered", "larger_total_mask_wins"):
            raise ValueError(f"unknown tie break {self.count_tie_break!r}")


DEFAULT_CONFIG = BbbdConfig()


def _check_extents(a: Instance, b: Instance):
    if a.mask.shape != b.mask.shape:
        raise ExtentMismatch(
            f"instances {a.id!r} and {b.id!r} have mask extents "
            f"{a.mask.shape} and {b.mask.shape}"
        )


def _collide(a_crop: np.ndarray, b_crop: np.ndarray, rule: CollisionRule) -> bool:
    if rule == "none":
        return True
    if rule == "overlap_only":
        return bool(np.logical_and(a_crop, b_crop).any())
    return bool(np.logical_and(dilate8(a_crop), b_crop).any())


def classify_pair(a: Instance, b: Instance, cfg: BbbdConfig = DEFAULT_CONFIG) -> Relation:
    _check_extents(a, b)

    ia = intersection(a.bbox, b.bbox)
    if ia is None:
        return Relation.NO_RELATION

    mc_a = count_in(a.mask, ia)
    mc_b = count_in(b.mask, ia)
    if mc_a == 0 or mc_b == 0:
        return Relation.NO_RELATION

    # collision is judged inside the window only
    if not _collide(crop(a.mask, ia), crop(b.mask, ia), cfg.collision_rule):
        return Relation.NO_RELATION

    verdict = Relation.NO_RELATION
    if contains(b.bbox, a.bbox):
        verdict = Relation.FIRST_OCCLUDES_SECOND
    elif contains(a.bbox, b.bbox):
        verdict = Relation.SECOND_OCCLUDES_FIRST

    # the count comparison runs after containment and overrides it
    if mc_a > mc_b:
        return Relation.FIRST_OCCLUDES_SECOND
    if mc_a < mc_b:
        return Relation.SECOND_OCCLUDES_FIRST

    if verdict is Relation.NO_RELATION and cfg.count_tie_break == "larger_total_mask_wins":
        pa, pb = a.population, b.population
        if pa > pb:
            return Relation.FIRST_OCCLUDES_SECOND
        if pa < pb:
            return Relation.SECOND_OCCLUDES_FIRST
    return verdict


def _validate_scene(instances: Sequence[Instance]):
    seen = set()
    for inst in instances:
        if inst.id in seen:
            raise DuplicateId(f"duplicate instance id {inst.id!r}")
        seen.add(inst.id)
    if instances:
        shape = instances[0].mask.shape
        for inst in instances[1:]:
            if inst.mask.shape != shape:
                raise ExtentMismatch(
                    f"instance {inst.id!r} has extent {inst.mask.shape}, expected {shape}"
                )


def pairwise_matrix(
    instances: Sequence[Instance],
    relate: Callable[[Instance, Instance], int],
    jobs: int = 1,
) -> np.ndarray:
    """Fill an antisymmetric order matrix from a pair verdict function.

    ``relate(a, b)`` returns the value of ``cells[a][b]``. Pairs are
    independent, so with ``jobs > 1`` they are split over a thread pool;
    each worker writes disjoint cells and the result equals the
    sequential one.
    """
    _validate_scene(instances)
    n = len(instances)
    cells = np.zeros((n, n), dtype=np.int8)
    pairs = list(itertools.combinations(range(n), 2))

    def run(chunk):
        for i, j in chunk:
            v = int(relate(instances[i], instances[j]))
            cells[i, j] = v
            cells[j, i] = -v

    if jobs <= 1 or len(pairs) < 2:
        run(pairs)
    else:
        chunks = [pairs[k::jobs] for k in range(jobs)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(run, chunks))
    return cells


def build_order_matrix(
    instances: Sequence[Instance],
    cfg: BbbdConfig = DEFAULT_CONFIG,
    jobs: int = 1,
) -> np.ndarray:
    """N x N int8 matrix; ``cells[i, j] == 1`` means instance i occludes j."""
    return pairwise_matrix(instances, lambda a, b: classify_pair(a, b, cfg), jobs)


def detect_occluded(cells: np.ndarray) -> np.ndarray:
    """An instance is occluded iff its row holds at least one -1."""
    cells = np.asarray(cells)
    if cells.size == 0:
        return np.zeros(cells.shape[0], dtype=bool)
    return (cells == -1).any(axis=1)
