"""Scene files and the COCOA amodal annotation adapter.

Canonical scene JSON::

    {
      "schema_version": 1,
      "image": {"id": ..., "width": W, "height": H},
      "instances": [
        {"id": ..., "category": "...", "bbox": [x_min, y_min, x_max, y_max],
         "mask": {"rle": [counts...]} | {"polygon": [x0, y0, x1, y1, ...]}}
      ],
      "gt": {"order_pairs": [[occluder_id, occludee_id], ...],
             "occlusion_ratio": {"<id>": fraction}}
    }

Boxes are inclusive pixel coordinates. RLE counts are column-major and
start with a background run. ``category``, ``bbox`` and ``gt`` are
optional. :func:`save_scene` always writes RLE, sorts instances by id and
emits keys in the order above, so saving is a canonicalization.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .detector import Instance
from .errors import (
    LengthMismatch,
    MissingField,
    ParseError,
    SchemaError,
    UnsupportedEncoding,
    ValidationError,
)
from .evaluation import GroundTruth
from .raster import BBox, contains, decode_rle, encode_rle, rasterize_polygon, tight_bbox
from .scene import Scene

__all__ = [
    "SCHEMA_VERSION",
    "load_scene",
    "loads_scene",
    "save_scene",
    "scene_to_dict",
    "order_to_json",
    "convert_cocoa",
]

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def _id_key(v):
    return (0, v, "") if isinstance(v, int) else (1, 0, str(v))


def _require(obj, key, path, types):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"missing field {key!r}", path)
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, types):
        raise SchemaError(f"field {key!r} has wrong type {type(value).__name__}", f"{path}.{key}")
    return value


def _parse_mask(obj, path, width, height) -> np.ndarray:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise SchemaError("mask must hold exactly one of 'rle' or 'polygon'", path)
    if "rle" in obj:
        counts = obj["rle"]
        if not isinstance(counts, list) or not all(
            isinstance(c, int) and not isinstance(c, bool) for c in counts
        ):
            raise SchemaError("rle must be an array of integers", f"{path}.rle")
        try:
            return decode_rle(counts, width, height)
        except LengthMismatch as exc:
            raise ValidationError(f"{path}.rle: {exc}") from exc
    if "polygon" in obj:
        pts = obj["polygon"]
        if (
            not isinstance(pts, list)
            or len(pts) % 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pts)
        ):
            raise SchemaError("polygon must be a flat array of x, y numbers", f"{path}.polygon")
        if len(pts) < 6:
            raise ValidationError(f"{path}.polygon: fewer than 3 vertices")
        return rasterize_polygon(np.reshape(pts, (-1, 2)), width, height)
    raise SchemaError("mask must hold 'rle' or 'polygon'", path)


def scene_from_dict(doc: Any) -> Scene:
    if not isinstance(doc, dict):
        raise SchemaError("scene must be a JSON object")
    version = _require(doc, "schema_version", "$", int)
    if version != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema_version {version}")
    image = _require(doc, "image", "$", dict)
    image_id = _require(image, "id", "$.image", (int, str))
    width = _require(image, "width", "$.image", int)
    height = _require(image, "height", "$.image", int)
    if width <= 0 or height <= 0:
        raise ValidationError(f"image extent must be positive, got {width}x{height}")

    instances = []
    seen = set()
    for k, item in enumerate(_require(doc, "instances", "$", list)):
        path = f"$.instances[{k}]"
        iid = _require(item, "id", path, (int, str))
        if iid in seen:
            raise ValidationError(f"{path}: duplicate instance id {iid!r}")
        seen.add(iid)
        category = item.get("category")
        if category is not None and not isinstance(category, str):
            raise SchemaError("category must be a string", f"{path}.category")
        mask = _parse_mask(_require(item, "mask", path, dict), f"{path}.mask", width, height)
        support = tight_bbox(mask)
        if "bbox" in item:
            raw = item["bbox"]
            if (
                not isinstance(raw, list)
                or len(raw) != 4
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in raw)
            ):
                raise SchemaError("bbox must be 4 integers", f"{path}.bbox")
            box = BBox(*raw)
            if box.x_min > box.x_max or box.y_min > box.y_max:
                raise ValidationError(f"{path}.bbox: zero-area box {raw}")
            if min(raw) < 0 or box.x_max >= width or box.y_max >= height:
                raise ValidationError(f"{path}.bbox: {raw} outside {width}x{height} image")
            if not contains(box, support):
                raise ValidationError(f"{path}.bbox: {raw} does not cover mask support {support}")
        else:
            if support is None:
                raise ValidationError(f"{path}: empty mask and no bbox")
            box = support
        instances.append(Instance(iid, box, mask, category))

    scene = Scene(image_id, width, height, instances)
    if doc.get("gt") is not None:
        scene.gt = _parse_gt(doc["gt"], instances)
    return scene


def _parse_gt(gt, instances) -> GroundTruth:
    if not isinstance(gt, dict):
        raise SchemaError("gt must be an object", "$.gt")
    index = {inst.id: k for k, inst in enumerate(instances)}
    n = len(instances)
    order = np.zeros((n, n), dtype=np.int8)
    pairs = _require(gt, "order_pairs", "$.gt", list)
    for k, pair in enumerate(pairs):
        path = f"$.gt.order_pairs[{k}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError("order pair must be [occluder_id, occludee_id]", path)
        occluder, occludee = pair
        if occluder not in index or occludee not in index:
            raise ValidationError(f"{path}: unknown instance id in {pair}")
        i, j = index[occluder], index[occludee]
        if i == j or order[i, j] == -1:
            raise ValidationError(f"{path}: pair {pair} contradicts another pair")
        order[i, j], order[j, i] = 1, -1

    ratio = None
    if gt.get("occlusion_ratio") is not None:
        raw = gt["occlusion_ratio"]
        if not isinstance(raw, dict):
            raise SchemaError("occlusion_ratio must be an object", "$.gt.occlusion_ratio")
        by_str = {str(inst.id): k for k, inst in enumerate(instances)}
        ratio = np.zeros(n)
        for key, value in raw.items():
            if key not in by_str:
                raise ValidationError(f"$.gt.occlusion_ratio: unknown instance id {key!r}")
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0 <= value <= 1:
                raise ValidationError(f"$.gt.occlusion_ratio.{key}: {value!r} not in [0, 1]")
            ratio[by_str[key]] = value
    return GroundTruth.from_order(order, ratio)


def loads_scene(text) -> Scene:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from exc
    return scene_from_dict(doc)


def load_scene(path) -> Scene:
    """Read and validate one scene file; ``scene.gt`` is set when present."""
    return loads_scene(Path(path).read_bytes())


def scene_to_dict(scene: Scene) -> dict:
    order = sorted(range(len(scene.instances)), key=lambda k: _id_key(scene.instances[k].id))
    instances = []
    for k in order:
        inst = scene.instances[k]
        item = {"id": inst.id}
        if inst.category is not None:
            item["category"] = inst.category
        item["bbox"] = list(inst.bbox)
        item["mask"] = {"rle": encode_rle(inst.mask)}
        instances.append(item)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "image": {"id": scene.image_id, "width": scene.width, "height": scene.height},
        "instances": instances,
    }
    gt = scene.gt
    if gt is not None:
        ids = scene.ids
        pairs = [
            [ids[i], ids[j]]
            for i, j in zip(*np.nonzero(gt.order == 1))
        ]
        pairs.sort(key=lambda p: (_id_key(p[0]), _id_key(p[1])))
        block = {"order_pairs": pairs}
        if gt.occlusion_ratio is not None:
            block["occlusion_ratio"] = {
                str(ids[k]): float(gt.occlusion_ratio[k]) for k in order
            }
        doc["gt"] = block
    return doc


def save_scene(scene: Scene, path=None) -> bytes:
    """Canonical UTF-8 bytes for ``scene``; also written to ``path`` if given."""
    data = (json.dumps(scene_to_dict(scene), separators=(",", ":"), ensure_ascii=False) + "\n")
    data = data.encode("utf-8")
    if path is not None:
        Path(path).write_bytes(data)
    return data


def order_to_json(ids, cells) -> bytes:
    """``{"ids": [...], "cells": [[...]]}`` with rows in ``ids`` order."""
    doc = {"ids": list(ids), "cells": np.asarray(cells).astype(int).tolist()}
    return (json.dumps(doc, separators=(",", ":")) + "\n").encode("utf-8")


# --- COCOA -----------------------------------------------------------------


def _decode_coco_rle(rle, width, height, where) -> np.ndarray:
    if not isinstance(rle, dict) or "counts" not in rle:
        raise MissingField(f"{where}: visible_mask lacks 'counts'")
    counts = rle["counts"]
    if isinstance(counts, (str, bytes)):
        raise UnsupportedEncoding(
            f"{where}: compressed RLE string; decompress to a counts list first"
        )
    size = rle.get("size", [height, width])
    if list(size) != [height, width]:
        raise LengthMismatch(f"{where}: mask size {size} differs from image {height}x{width}")
    return decode_rle(counts, width, height)


def _amodal_polygon(region, width, height, where) -> np.ndarray:
    seg = region.get("segmentation")
    if seg is None:
        raise MissingField(f"{where}: missing 'segmentation'")
    # some exports wrap the single polygon in a list
    if seg and isinstance(seg[0], list):
        out = np.zeros((height, width), dtype=bool)
        for poly in seg:
            out ^= rasterize_polygon(np.reshape(poly, (-1, 2)), width, height)
        return out
    return rasterize_polygon(np.reshape(seg, (-1, 2)), width, height)


def _convert_image(image, regions, errors) -> Optional[Scene]:
    width, height = int(image["width"]), int(image["height"])
    instances, amodals, layers, ratios = [], [], [], []
    for k, region in enumerate(regions):
        where = f"image {image['id']} region {region.get('id', k)}"
        try:
            if "order" not in region:
                raise MissingField(f"{where}: missing 'order'")
            if "occlude_rate" not in region:
                raise MissingField(f"{where}: missing 'occlude_rate'")
            amodal = _amodal_polygon(region, width, height, where)
            rate = float(region["occlude_rate"])
            if "visible_mask" in region:
                modal = _decode_coco_rle(region["visible_mask"], width, height, where)
            elif rate == 0:
                modal = amodal
            else:
                raise MissingField(f"{where}: occluded region without 'visible_mask'")
            box = tight_bbox(modal) or tight_bbox(amodal)
            if box is None:
                raise ValidationError(f"{where}: region covers no pixels")
        except (MissingField, UnsupportedEncoding, LengthMismatch, ValidationError,
                ValueError, TypeError) as exc:
            if errors is None:
                raise
            errors.append(str(exc))
            log.warning("skipping %s", exc)
            continue
        instances.append(Instance(region.get("id", k), box, modal, region.get("name")))
        amodals.append(amodal)
        layers.append(region["order"])
        ratios.append(min(max(rate, 0.0), 1.0))

    n = len(instances)
    order = np.zeros((n, n), dtype=np.int8)
    for i in range(n):
        for j in range(i + 1, n):
            if layers[i] == layers[j] or not np.logical_and(amodals[i], amodals[j]).any():
                continue
            # smaller layer number is nearer the camera
            v = 1 if layers[i] < layers[j] else -1
            order[i, j], order[j, i] = v, -v
    gt = GroundTruth.from_order(order, np.array(ratios, dtype=float))
    return Scene(image["id"], width, height, instances, gt)


def convert_cocoa(annotation_json, images_meta=None, errors: Optional[list] = None) -> list[Scene]:
    """Turn COCOA amodal annotations into scenes with ground truth.

    ``annotation_json`` is the parsed annotation file: an ``annotations``
    list whose entries carry ``image_id`` and ``regions``, plus an
    ``images`` list giving each image's size unless ``images_meta`` is
    supplied. The visible mask comes from ``visible_mask`` (uncompressed
    RLE) or, for unoccluded regions, from the amodal ``segmentation``
    polygon. Region pairs whose amodal masks overlap are ordered by their
    ``order`` layer.

    With an ``errors`` list, bad regions are skipped and their
    diagnostics appended; without one, the first problem is raised.
    """
    meta = images_meta if images_meta is not None else annotation_json.get("images", [])
    by_id = {img["id"]: img for img in meta}
    scenes = []
    for ann in annotation_json.get("annotations", []):
        image_id = ann.get("image_id")
        if image_id not in by_id:
            exc = MissingField(f"annotation for unknown image {image_id!r}")
            if errors is None:
                raise exc
            errors.append(str(exc))
            continue
        scene = _convert_image(by_id[image_id], ann.get("regions", []), errors)
        scenes.append(scene)
    return scenes
