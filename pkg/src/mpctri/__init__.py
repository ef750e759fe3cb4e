"""Deterministic MPC simulator and constant-round exact triangle counting."""

from mpctri.graph import (
    Graph,
    GraphError,
    ParseError,
    alpha_interval,
    degeneracy,
    degree_vector,
    gen_forest_union,
    gen_gnm,
    load_edge_list,
    min_degree_endpoint_sum,
)
from mpctri.oracle import brute_force_triangles, verify_run
from mpctri.primitives import (
    ContractViolation,
    DistList,
    KeySpec,
    load_list,
    mpc_count,
    mpc_count_duplicates,
    mpc_duplicate,
    mpc_filter,
    mpc_partition_adjacency,
    mpc_sort,
    mpc_tag_count,
)
from mpctri.sim import (
    BudgetViolation,
    CapacityError,
    RunMetrics,
    SimConfig,
    Simulation,
    new_simulation,
    run_superstep,
    trace,
)
from mpctri.triangles import TriangleResult, count_triangles, enumerate_triangles

__version__ = "0.1.0"

__all__ = [
    "BudgetViolation", "CapacityError", "ContractViolation", "DistList", "Graph",
    "GraphError", "KeySpec", "ParseError", "RunMetrics", "SimConfig", "Simulation",
    "TriangleResult", "alpha_interval", "brute_force_triangles", "count_triangles",
    "degeneracy", "degree_vector", "enumerate_triangles", "gen_forest_union", "gen_gnm",
    "load_edge_list", "load_list", "min_degree_endpoint_sum", "mpc_count",
    "mpc_count_duplicates", "mpc_duplicate", "mpc_filter", "mpc_partition_adjacency",
    "mpc_sort", "mpc_tag_count", "new_simulation", "run_superstep", "trace",
    "verify_run",
]
