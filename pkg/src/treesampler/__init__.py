"""Exact sampling and counting of weighted directed spanning trees.

Trees come in two kinds: spanning trees (any number of root children) and
dependency trees (exactly one root child). Samplers:

* ``wilson``: loop-erased random walk, spanning trees.
* ``wilson_rc``: walk with the root child fixed by raw weight; biased, kept for comparison.
* ``wilson_reject``: ``wilson`` with rejection, exact for dependency trees.
* ``colbourn``: ancestral sampling from matrix-tree marginals, either kind.
* ``swor``: distinct trees without replacement.
"""

from .colbourn import ColbournSampler, build_laplacian, colbourn, condition, edge_marginals_into, mtt_marginals, partition_function
from .errors import DomainError, GraphError, TreeSamplerError
from .graph import ROOT, Graph, Tree, TreeKind, is_tree, log_tree_weight, normalize_stochastic, tree_weight, validate_graph
from .oracle import ExactDistribution, enumerate_trees, exact_distribution, exact_marginals, exact_swor_conditional
from .swor import SworSampler, swor, swor_batch
from .wilson import RootedWilson, wilson, wilson_rc, wilson_reject

__all__ = [
    "ROOT",
    "ColbournSampler",
    "DomainError",
    "ExactDistribution",
    "Graph",
    "GraphError",
    "RootedWilson",
    "SworSampler",
    "Tree",
    "TreeKind",
    "TreeSamplerError",
    "build_laplacian",
    "colbourn",
    "condition",
    "edge_marginals_into",
    "enumerate_trees",
    "exact_distribution",
    "exact_marginals",
    "exact_swor_conditional",
    "is_tree",
    "log_tree_weight",
    "mtt_marginals",
    "normalize_stochastic",
    "partition_function",
    "swor",
    "swor_batch",
    "tree_weight",
    "validate_graph",
    "wilson",
    "wilson_rc",
    "wilson_reject",
]
