"""Approximate edge colorings, balanced orientations and Schreier decorations."""

from .generators import (
    gen_bipartite_regular,
    gen_random_regular,
    gen_rotation_graph,
    gen_torus,
    gen_truncated_even_tree,
)
from .graph import (
    CorrReport,
    Graph,
    Orientation,
    PartialEdgeColoring,
    corr_of_coloring,
    corr_of_decoration,
    corr_of_orientation,
    edge_distance,
    load_graph,
    save_graph,
    sparse_edge_classes,
)
from .koenig import OddCycleError, eliminate_color, koenig_color, vizing_plus_one
from .measures import (
    EdgeMeasure,
    VertexMeasure,
    edge_measure_from,
    make_quasi_invariant,
    measure_from_preset,
)
from .orient import approximate_balanced_orientation, grow_path_system, pack_cycles
from .schreier import Decoration, build_double_cover, decorate, verify_free_action

__version__ = "0.1.0"

__all__ = [
    "CorrReport",
    "Decoration",
    "EdgeMeasure",
    "Graph",
    "OddCycleError",
    "Orientation",
    "PartialEdgeColoring",
    "VertexMeasure",
    "approximate_balanced_orientation",
    "build_double_cover",
    "corr_of_coloring",
    "corr_of_decoration",
    "corr_of_orientation",
    "decorate",
    "edge_distance",
    "edge_measure_from",
    "eliminate_color",
    "gen_bipartite_regular",
    "gen_random_regular",
    "gen_rotation_graph",
    "gen_torus",
    "gen_truncated_even_tree",
    "grow_path_system",
    "koenig_color",
    "load_graph",
    "make_quasi_invariant",
    "measure_from_preset",
    "pack_cycles",
    "save_graph",
    "sparse_edge_classes",
    "verify_free_action",
    "vizing_plus_one",
]
