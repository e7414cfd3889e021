"""Graph coloring from sparsified palettes: tiny per-vertex color lists,
conflict graphs, list-coloring solvers, and resource-accounted streaming and
query-model simulators."""

from .graphs import (
    Graph,
    DegeneracyResult,
    new_graph,
    gnp,
    gnp_triangle_free,
    clique_collection,
    count_triangles,
    degeneracy_order,
    brute_force_list_color,
    max_independent_set,
    load_edge_list,
    save_edge_list,
)
from .palette import (
    GlobalPalette,
    DegPlusOnePalette,
    OneEpsDegPalette,
    DegeneracyPalette,
    ExplicitPalette,
    ListAssignment,
    sample_lists,
    c_degree,
    trim_bad_colors,
    potential_lists,
    resolve_list,
)
from .conflict import ConflictGraph, build_conflict_graph, oriented_out_degrees
from .solver import (
    Coloring,
    SolveOutcome,
    verify_coloring,
    greedy_color,
    moser_tardos_list_color,
    color_almost_clique,
)
from .decompose import (
    FriendEdgeSet,
    Decomposition,
    friend_edges,
    decompose,
    verify_decomposition,
)
from .nibble import NibbleSchedule, NibbleState, nibble_schedule, nibble_start, nibble_round
from .pipelines import (
    PipelineResult,
    color_one_eps_delta,
    color_triangle_free,
    color_deg_plus_one,
    color_one_eps_deg,
    color_degeneracy,
    partition_color,
    lower_bound_demo_od,
)
from .sublinear import ResourceLedger, EdgeStream, stream_color, query_color
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
