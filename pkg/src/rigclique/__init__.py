"""Sparse random intersection graphs G(n, m, P) and their largest cliques."""

from .distributions import SetSizeLaw, moments_y, sample_size, tail_prob_y
from .instance import (AttributeIndex, IntersectionInstance, SparseGraph, build_graph,
                       generate, generate_binomial, invert)
from .cliques import (CliqueResult, exact_max_clique, greedy_clique, max_monochromatic,
                      mono_clique)

__all__ = [
    "AttributeIndex", "CliqueResult", "IntersectionInstance", "SetSizeLaw", "SparseGraph",
    "build_graph", "exact_max_clique", "generate", "generate_binomial", "greedy_clique",
    "invert", "max_monochromatic", "moments_y", "mono_clique", "sample_size", "tail_prob_y",
]

__version__ = "0.1.0"
