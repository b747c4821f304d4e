"""Randomized list coloring of bipartite graphs with index-biased sampling."""

from .bias import BiasProfile, list_size_k, normalizer_C, prob, rho
from .colorer import PartialColoring, RunReport, moser_tardos_color, verify_proper
from .graph_core import BipartiteGraph, build_graph, gen_regular_bipartite
from .list_model import ListAssignment, gen_lists, weight_stats

__version__ = "0.1.0"

__all__ = [
    "BiasProfile",
    "BipartiteGraph",
    "ListAssignment",
    "PartialColoring",
    "RunReport",
    "build_graph",
    "gen_lists",
    "gen_regular_bipartite",
    "list_size_k",
    "moser_tardos_color",
    "normalizer_C",
    "prob",
    "rho",
    "verify_proper",
    "weight_stats",
]
