"""Seeded graph matching driven by personalized PageRank signatures."""

from .graph import EdgeListError, Graph, load_edge_list, read_edge_list, write_edge_list
from .matcher import MatchConfig, MatchCriteria, MatchResult, run_baseline_pgm, run_pprgm
from .ppr import exact_ppr, forward_push
from .random_model import (CorrelatedPair, SampleParams, gen_er, sample_correlated,
                           sample_instance, sample_seeds)

__all__ = [
    "EdgeListError", "Graph", "load_edge_list", "read_edge_list", "write_edge_list",
    "MatchConfig", "MatchCriteria", "MatchResult", "run_baseline_pgm", "run_pprgm",
    "exact_ppr", "forward_push",
    "CorrelatedPair", "SampleParams", "gen_er", "sample_correlated", "sample_instance",
    "sample_seeds",
]
