"""
Order matrices and occlusion graphs
===================================

The order matrix has a 1 where the row instance is in front of the column
instance. The graph view draws an arrow from each hidden instance to the
one hiding it. Render the DOT output with ``dot -Tpng``.
"""

from bbbd import build_order_matrix, detect_occluded
from bbbd.graph import to_dot, to_graph_json
from bbbd.synth import SceneSpec, Shape, render_modal

spec = SceneSpec(
    96,
    64,
    (
        Shape.disc(30, 30, 12),
        Shape.diamond(44, 34, 14, 10),
        Shape.ellipse(60, 28, 16, 9, 0.3),
        Shape.disc(82, 50, 8),
    ),
)
instances = render_modal(spec)
ids = [f"{inst.category}{inst.id}" for inst in instances]

cells = build_order_matrix(instances)
print(cells)
print("occluded:", dict(zip(ids, detect_occluded(cells).tolist())))

print(to_dot(ids, cells, name="demo"))
print(to_graph_json(ids, cells))
