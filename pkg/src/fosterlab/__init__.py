"""Effective resistance, Foster sum rules and random-walk checks on graphs and lattices."""
from .exact import DisconnectedGraphError, OracleError, exact_resistance, exact_resistance_matrix
from .graph import EdgeListFormatError, Graph, GraphError, load_edge_list, save_edge_list, subdivide
from .lattice import Ball, Family, LatticeError, PairClass, Torus, build, resolve_pair
from .solver import ConvergenceError, ExtrapolationError, SolveConfig, cg_resistance, infinite_pair_resistance

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "ConvergenceError",
    "DisconnectedGraphError",
    "EdgeListFormatError",
    "ExtrapolationError",
    "Family",
    "Graph",
    "GraphError",
    "LatticeError",
    "OracleError",
    "PairClass",
    "SolveConfig",
    "Torus",
    "build",
    "cg_resistance",
    "exact_resistance",
    "exact_resistance_matrix",
    "infinite_pair_resistance",
    "load_edge_list",
    "resolve_pair",
    "save_edge_list",
    "subdivide",
]
