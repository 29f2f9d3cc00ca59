"""Training-free occlusion detection and depth-order recovery from modal masks and boxes."""

from .baselines import area_matrix, yaxis_matrix
from .detector import (
    BbbdConfig,
    Instance,
    Relation,
    build_order_matrix,
    classify_pair,
    detect_occluded,
)
from .evaluation import EvalReport, GroundTruth, aggregate, detection_report, evaluate, order_accuracy
from .ingest import convert_cocoa, load_scene, save_scene
from .raster import BBox
from .scene import Scene

__version__ = "0.1.0"

__all__ = [
    "BBox",
    "BbbdConfig",
    "EvalReport",
    "GroundTruth",
    "Instance",
    "Relation",
    "Scene",
    "aggregate",
    "area_matrix",
    "build_order_matrix",
    "classify_pair",
    "convert_cocoa",
    "detect_occluded",
    "detection_report",
    "evaluate",
    "load_scene",
    "order_accuracy",
    "save_scene",
    "yaxis_matrix",
]
