"""Box geometry and binary mask primitives.

Masks are 2-D boolean numpy arrays indexed ``[row, col]`` (``[y, x]``).
Boxes use inclusive integer pixel coordinates, so a box ``(0, 0, 0, 0)``
covers exactly one pixel and two boxes sharing a border column overlap.
The empty box is represented by ``None``.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import ndimage

from .errors import DegeneratePolygon, ExtentMismatch, LengthMismatch

__all__ = [
    "BBox",
    "EMPTY",
    "intersection",
    "contains",
    "bbox_from_float",
    "crop",
    "count_in",
    "decode_rle",
    "encode_rle",
    "rasterize_polygon",
    "dilate8",
    "masks_intersect",
    "tight_bbox",
]


class BBox(NamedTuple):
    x_min: int
    y_min: int
    x_max: int
    y_max: int

    @property
    def width(self) -> int:
        return self.x_max - self.x_min + 1

    @property
    def height(self) -> int:
        return self.y_max - self.y_min + 1

    @property
    def area(self) -> int:
        return self.width * self.height

    def slices(self) -> tuple[slice, slice]:
        """Row and column slices selecting this box from a ``[y, x]`` array."""
        return slice(self.y_min, self.y_max + 1), slice(self.x_min, self.x_max + 1)


EMPTY = None


def intersection(a: Optional[BBox], b: Optional[BBox]) -> Optional[BBox]:
    if a is None or b is None:
        return None
    x0 = max(a.x_min, b.x_min)
    y0 = max(a.y_min, b.y_min)
    x1 = min(a.x_max, b.x_max)
    y1 = min(a.y_max, b.y_max)
    if x0 > x1 or y0 > y1:
        return None
    return BBox(x0, y0, x1, y1)


def contains(outer: Optional[BBox], inner: Optional[BBox]) -> bool:
    """True iff every pixel of ``inner`` lies in ``outer``.

    The empty box is contained in everything and contains only itself.
    """
    if inner is None:
        return True
    if outer is None:
        return False
    return (
        outer.x_min <= inner.x_min
        and outer.y_min <= inner.y_min
        and inner.x_max <= outer.x_max
        and inner.y_max <= outer.y_max
    )


def bbox_from_float(x0, y0, x1, y1, width: int, height: int) -> Optional[BBox]:
    """Convert a continuous ``[x0, x1) x [y0, y1)`` box to inclusive pixels.

    Mins are floored, maxes ceiled minus one, then the result is clamped
    to the image. Returns ``None`` when nothing survives.
    """
    bx0 = max(int(math.floor(x0)), 0)
    by0 = max(int(math.floor(y0)), 0)
    bx1 = min(int(math.ceil(x1)) - 1, width - 1)
    by1 = min(int(math.ceil(y1)) - 1, height - 1)
    if bx0 > bx1 or by0 > by1:
        return None
    return BBox(bx0, by0, bx1, by1)


def _clip(r: Optional[BBox], shape: tuple[int, int]) -> Optional[BBox]:
    h, w = shape
    if h == 0 or w == 0:
        return None
    return intersection(r, BBox(0, 0, w - 1, h - 1))


def crop(m: np.ndarray, r: Optional[BBox]) -> np.ndarray:
    """View of ``m`` inside ``r`` (clipped to the extent); empty for ``None``."""
    r = _clip(r, m.shape)
    if r is None:
        return m[:0, :0]
    return m[r.slices()]


def count_in(m: np.ndarray, r: Optional[BBox]) -> int:
    """Number of set pixels of ``m`` inside ``r``."""
    return int(np.count_nonzero(crop(m, r)))


def decode_rle(counts: Sequence[int], width: int, height: int) -> np.ndarray:
    """Expand column-major, background-first run lengths into a mask."""
    counts = np.asarray(counts, dtype=np.int64).ravel()
    if counts.size and counts.min() < 0:
        raise LengthMismatch("run lengths must be non-negative")
    total = int(counts.sum())
    if total != width * height:
        raise LengthMismatch(
            f"run lengths sum to {total}, expected {width}x{height}={width * height}"
        )
    values = np.arange(counts.size) % 2 == 1
    flat = np.repeat(values, counts)
    return flat.reshape(width, height).T.copy()


def encode_rle(m: np.ndarray) -> list[int]:
    """Canonical column-major run lengths; a leading 0 iff the first pixel is set."""
    flat = np.asarray(m, dtype=bool).T.ravel()
    if flat.size == 0:
        return []
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], change, [flat.size]))
    runs = np.diff(bounds).tolist()
    if flat[0]:
        runs.insert(0, 0)
    return runs


def rasterize_polygon(points, width: int, height: int) -> np.ndarray:
    """Fill a polygon with the even-odd rule, sampling pixel centers.

    ``points`` is a sequence of ``(x, y)`` vertices; the polygon is closed
    implicitly. Scanline fill: each row center collects its edge crossings
    and a pixel is set when an odd number of them lie strictly to its right.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 3:
        raise DegeneratePolygon(f"need at least 3 vertices, got {len(pts)}")
    out = np.zeros((height, width), dtype=bool)
    if width == 0 or height == 0:
        return out

    xi, yi = pts[:, 0], pts[:, 1]
    xj, yj = np.roll(xi, 1), np.roll(yi, 1)
    xc = np.arange(width) + 0.5

    lo = max(int(math.floor(yi.min() - 0.5)), 0)
    hi = min(int(math.ceil(yi.max() + 0.5)), height)
    for row in range(lo, hi):
        yc = row + 0.5
        crossing = (yi > yc) != (yj > yc)
        if not crossing.any():
            continue
        a, b = xi[crossing], xj[crossing]
        ya, yb = yi[crossing], yj[crossing]
        xs = np.sort((b - a) * (yc - ya) / (yb - ya) + a)
        right = xs.size - np.searchsorted(xs, xc, side="right")
        out[row] = right % 2 == 1
    return out


_EIGHT = np.ones((3, 3), dtype=bool)


def dilate8(m: np.ndarray) -> np.ndarray:
    """Grow the mask by one pixel in all 8 directions; no wraparound."""
    m = np.asarray(m, dtype=bool)
    if m.size == 0:
        return m.copy()
    return ndimage.binary_dilation(m, structure=_EIGHT)


def masks_intersect(a: np.ndarray, b: np.ndarray) -> bool:
    if a.shape != b.shape:
        raise ExtentMismatch(f"mask extents differ: {a.shape} vs {b.shape}")
    return bool(np.logical_and(a, b).any())


def tight_bbox(m: np.ndarray) -> Optional[BBox]:
    rows = np.flatnonzero(m.any(axis=1))
    if rows.size == 0:
        return None
    cols = np.flatnonzero(m.any(axis=0))
    return BBox(int(cols[0]), int(rows[0]), int(cols[-1]), int(rows[-1]))
