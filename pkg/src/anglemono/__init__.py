"""Angle-monotone paths and trees in plane triangulations, and convex-cap unfolding."""
from .geometry import (
    DegenerateHull, DegenerateVector, Polygon2, Wedge, angdist, convex_hull, deg, direction,
    in_wedge, min_enclosing_arc, point_in_polygon,
)
from .graph import AugmentedGraph, BadGraph, PlaneGraph, Ray, ValidationReport, augment, validate, wedge_incidence
from .paths import (
    AnglePath, CriticalAngleList, EnvelopePath, NotAPath, ReachSet, SweepContext, critical_angles, envelope,
    find_path, find_path_scan, reach_set, region, spanning_ratio, verify_monotone,
)
from .spanning import (
    BudgetExhausted, Counterexample, NoTree, NotA45Graph, RootedTree, SpanningForest, Tree,
    algorithm1_forest, check_forest, counterexample_graph, prune_to_tree, spanning_tree_oracle, tree45,
)
from .cap import (
    ConvexCap, distortion_estimate, generate_cap, lift_forest, max_angle_distortion, overlap_check, project,
    radial_monotone_check, run_pipeline, unfold, validate_cap,
)
from .io import ParseError, InvalidGraph, graph_from_json, graph_to_json, parse_graph, read_off, write_off

__version__ = "0.1.0"

__all__ = [
    "DegenerateHull", "DegenerateVector", "Polygon2", "Wedge", "angdist", "convex_hull", "deg", "direction",
    "in_wedge", "min_enclosing_arc", "point_in_polygon",
    "AugmentedGraph", "BadGraph", "PlaneGraph", "Ray", "ValidationReport", "augment", "validate",
    "wedge_incidence",
    "AnglePath", "CriticalAngleList", "EnvelopePath", "NotAPath", "ReachSet", "SweepContext",
    "critical_angles", "envelope", "find_path", "find_path_scan", "reach_set", "region", "spanning_ratio",
    "verify_monotone",
    "BudgetExhausted", "Counterexample", "NoTree", "NotA45Graph", "RootedTree", "SpanningForest", "Tree",
    "algorithm1_forest", "check_forest", "counterexample_graph", "prune_to_tree", "spanning_tree_oracle",
    "tree45",
    "ConvexCap", "distortion_estimate", "generate_cap", "lift_forest", "max_angle_distortion",
    "overlap_check", "project", "radial_monotone_check", "run_pipeline", "unfold", "validate_cap",
    "ParseError", "InvalidGraph", "graph_from_json", "graph_to_json", "parse_graph", "read_off", "write_off",
]
