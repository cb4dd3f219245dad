"""Graphs, SPDE precision matrices and Gaussian Markov random fields."""

from .graph import Graph, graph_laplacian, grid_graph, read_edge_list, write_edge_list
from .model import (
    GMRF,
    LagError,
    MaternComparison,
    PrecisionModel,
    build_precision,
    dempster_check,
    gmrf_vs_matern_error,
    krige,
    range_parameter,
    sample,
    spde_precision,
)

__all__ = [
    "GMRF",
    "Graph",
    "LagError",
    "MaternComparison",
    "PrecisionModel",
    "build_precision",
    "dempster_check",
    "gmrf_vs_matern_error",
    "graph_laplacian",
    "grid_graph",
    "krige",
    "range_parameter",
    "read_edge_list",
    "sample",
    "spde_precision",
    "write_edge_list",
]
