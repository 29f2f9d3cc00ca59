"""Occlusion graphs: one node per instance, edges point occludee -> occluder."""

from __future__ import annotations

import json

import numpy as np

__all__ = ["edges", "to_dot", "to_graph_json"]


def edges(ids, cells) -> list[tuple]:
    """``(occludee, occluder)`` id pairs in row-major matrix order."""
    cells = np.asarray(cells)
    return [(ids[i], ids[j]) for i, j in zip(*np.nonzero(cells == -1))]


def _quote(v) -> str:
    return '"' + str(v).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(ids, cells, name="occlusion", labels=None) -> str:
    lines = [f"digraph {_quote(name)} {{"]
    for k, i in enumerate(ids):
        attr = f" [label={_quote(labels[k])}]" if labels is not None else ""
        lines.append(f"  {_quote(i)}{attr};")
    for src, dst in edges(ids, cells):
        lines.append(f"  {_quote(src)} -> {_quote(dst)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_graph_json(ids, cells) -> str:
    doc = {
        "nodes": list(ids),
        "edges": [{"source": s, "target": t} for s, t in edges(ids, cells)],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"
