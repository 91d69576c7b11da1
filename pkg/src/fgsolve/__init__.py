"""Solving A x X >= B over connected functional graphs."""

from .errors import InfeasibleSpec, SizeLimit, SolverTimeout
from .graph import (
    FunctionalGraph,
    canonical_form,
    direct_product,
    is_isomorphic,
    parse_fg,
    product_component,
    read_fg,
    write_fg,
)
from .multiset import Multiset, ms_division, parse_multiset
from .solver_abstraction import admissible_periods, solve_abstraction
from .solver_graph import solve_graph, solve_graph_naive
from .tabstraction import TAbstraction, t_abstraction

__all__ = [
    "FunctionalGraph",
    "InfeasibleSpec",
    "Multiset",
    "SizeLimit",
    "SolverTimeout",
    "TAbstraction",
    "admissible_periods",
    "canonical_form",
    "direct_product",
    "is_isomorphic",
    "ms_division",
    "parse_fg",
    "parse_multiset",
    "product_component",
    "read_fg",
    "solve_abstraction",
    "solve_graph",
    "solve_graph_naive",
    "t_abstraction",
    "write_fg",
]
