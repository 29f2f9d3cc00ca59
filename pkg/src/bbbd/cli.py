"""Command-line entry point: ``bbbd order|detect|eval|synth|convert``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .baselines import area_matrix, yaxis_matrix
from .detector import BbbdConfig, build_order_matrix, detect_occluded
from .errors import BBBDError, InfeasibleConstraints, MissingGroundTruth
from .evaluation import aggregate, evaluate, format_table, reports_to_csv
from .graph import to_dot
from .ingest import convert_cocoa, load_scene, order_to_json, save_scene
from .synth import generate_random, oracle_order, to_scene

log = logging.getLogger("bbbd")

METHODS = ("bbbd", "yaxis", "area")
COLLISION = {"adjacent8": "adjacent8", "overlap": "overlap_only", "none": "none"}
TIE_BREAK = {"none": "leave_unordered", "mask-area": "larger_total_mask_wins"}


def order_matrix(scene, method, cfg):
    if method == "bbbd":
        return build_order_matrix(scene.instances, cfg)
    if method == "yaxis":
        return yaxis_matrix(scene.instances)
    if method == "area":
        return area_matrix(scene.instances)
    raise ValueError(f"unknown method {method!r}")


def _config(args) -> BbbdConfig:
    return BbbdConfig(COLLISION[args.collision], TIE_BREAK[args.tie_break])


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _map_scenes(args, fn):
    """Apply ``fn(path, scene)`` to each input; results keep input order.

    Returns ``(results, failures)`` where failed inputs yield ``None``.
    """
    paths = sorted(args.scenes)

    def work(path):
        try:
            return fn(path, load_scene(path))
        except (BBBDError, OSError) as exc:
            log.error("%s: %s", path, exc)
            return None

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(work, paths))
    else:
        results = [work(p) for p in paths]
    failures = sum(r is None for r in results)
    return results, failures


def cmd_order(args) -> int:
    cfg = _config(args)
    out = _out_dir(args)

    def run(path, scene):
        cells = order_matrix(scene, args.method, cfg)
        stem = Path(path).stem
        (out / f"{stem}.order.json").write_bytes(order_to_json(scene.ids, cells))
        if args.format == "dot":
            (out / f"{stem}.dot").write_text(to_dot(scene.ids, cells, name=stem), encoding="utf-8")
        return True

    _, failures = _map_scenes(args, run)
    return 1 if failures else 0


def cmd_detect(args) -> int:
    cfg = _config(args)
    out = _out_dir(args)

    def run(path, scene):
        labels = detect_occluded(order_matrix(scene, args.method, cfg))
        doc = {"ids": scene.ids, "occluded": [bool(v) for v in labels]}
        (out / f"{Path(path).stem}.labels.json").write_bytes(
            (json.dumps(doc, separators=(",", ":")) + "\n").encode("utf-8")
        )
        return True

    _, failures = _map_scenes(args, run)
    return 1 if failures else 0


def cmd_eval(args) -> int:
    cfg = _config(args)

    def run(path, scene):
        if scene.gt is None:
            raise MissingGroundTruth(f"{path}: scene has no ground truth")
        return {
            m: evaluate(order_matrix(scene, m, cfg), scene.gt, strict=args.strict_order_accuracy)
            for m in METHODS
        }

    def guarded(path, scene):
        try:
            return run(path, scene)
        except MissingGroundTruth as exc:
            log.error("%s", exc)
            return None

    per_scene, failures = _map_scenes(args, guarded)
    per_scene = [r for r in per_scene if r is not None]
    totals = {m: aggregate(r[m] for r in per_scene) for m in METHODS}

    fmt = args.format if args.format != "dot" else "table"
    if fmt == "json":
        text = json.dumps(
            {"scenes": len(per_scene), "methods": {m: r.to_dict() for m, r in totals.items()}},
            indent=2,
        ) + "\n"
    elif fmt == "csv":
        text = reports_to_csv(totals)
    else:
        text = format_table(totals)

    if args.out:
        ext = {"json": "json", "csv": "csv", "table": "txt"}[fmt]
        (_out_dir(args) / f"report.{ext}").write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 1 if failures or not per_scene and args.scenes else 0


def cmd_synth(args) -> int:
    out = _out_dir(args)
    kinds = tuple(args.kinds.split(","))
    try:
        specs = generate_random(
            args.seed,
            args.count,
            overlap_range=(args.min_overlap, args.max_overlap),
            size_range=(args.min_size, args.max_size),
            n_shapes=(args.min_shapes, args.max_shapes),
            width=args.width,
            height=args.height,
            kinds=kinds,
        )
    except InfeasibleConstraints as exc:
        log.error("%s", exc)
        return 1
    bad = 0
    for k, spec in enumerate(specs):
        scene = to_scene(spec, image_id=k)
        data = save_scene(scene, out / f"scene_{k:05d}.json")
        if args.self_check:
            bad += not _self_check(spec, data)
    if bad:
        log.error("%d scene(s) failed the self-check", bad)
    log.info("wrote %d scene(s) to %s", len(specs), out)
    return 1 if bad else 0


def _self_check(spec, data) -> bool:
    """Reloaded scene agrees with a fresh oracle run and masks are disjoint."""
    from .ingest import loads_scene

    scene = loads_scene(data)
    cells, occluded = oracle_order(spec)
    masks = np.array([inst.mask for inst in scene.instances])
    disjoint = masks.size == 0 or masks.sum(axis=0).max(initial=0) <= 1
    return (
        np.array_equal(scene.gt.order, cells)
        and np.array_equal(scene.gt.occluded, occluded)
        and bool(disjoint)
    )


def cmd_convert(args) -> int:
    out = _out_dir(args)
    images = objects = positives = 0
    errors: list[str] = []
    total_failure = False
    for path in args.scenes:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            log.error("%s: %s", path, exc)
            total_failure = True
            continue
        for scene in convert_cocoa(doc, errors=errors):
            save_scene(scene, out / f"{scene.image_id}.json")
            images += 1
            objects += len(scene)
            positives += int(scene.gt.occluded.sum())
    for msg in errors:
        print(msg, file=sys.stderr)
    print(
        f"{images} images, {objects} objects, {positives} positive, "
        f"{objects - positives} negative"
    )
    return 1 if total_failure and images == 0 else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--method", choices=METHODS, default="bbbd")
    common.add_argument("--collision", choices=tuple(COLLISION), default="adjacent8")
    common.add_argument("--tie-break", choices=tuple(TIE_BREAK), default="none")
    common.add_argument("--format", choices=("json", "csv", "dot", "table"), default="json")
    common.add_argument("--out", default=None)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--strict-order-accuracy", action="store_true")

    parser = argparse.ArgumentParser(prog="bbbd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, help_text in (
        ("order", cmd_order, "write an order matrix (and DOT graph) per scene"),
        ("detect", cmd_detect, "write per-instance occlusion labels per scene"),
        ("eval", cmd_eval, "compare all methods against ground truth"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("scenes", nargs="*", help="scene JSON files")
        p.set_defaults(func=fn)

    p = sub.add_parser("synth", parents=[common], help="generate synthetic scenes with ground truth")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--min-shapes", type=int, default=2)
    p.add_argument("--max-shapes", type=int, default=2)
    p.add_argument("--min-overlap", type=float, default=0.1)
    p.add_argument("--max-overlap", type=float, default=0.5)
    p.add_argument("--min-size", type=float, default=4.0)
    p.add_argument("--max-size", type=float, default=16.0)
    p.add_argument("--kinds", default="disc,ellipse,diamond,polygon")
    p.add_argument("--self-check", action="store_true")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("convert", parents=[common], help="convert COCOA annotation files to scenes")
    p.add_argument("scenes", nargs="*", metavar="annotations", help="COCOA annotation JSON files")
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("BBBD_LOG", "WARNING").upper()
    logging.basicConfig(
        level=level if isinstance(logging.getLevelName(level), int) else "WARNING",
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    if args.command in ("order", "detect", "synth", "convert") and not args.out:
        parser.error(f"{args.command} requires --out")
    if args.format == "dot" and args.command != "order":
        parser.error("--format dot only applies to 'order'")
    if args.format == "csv" and args.command != "eval":
        parser.error("--format csv only applies to 'eval'")
    if args.method != "bbbd" and args.command not in ("order", "detect"):
        parser.error(f"--method does not apply to '{args.command}'")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
