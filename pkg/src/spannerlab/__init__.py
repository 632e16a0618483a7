"""Path-reporting distance oracles, hopsets, pairwise spanners and lower-bound labs."""
from .cluster_prdo import build_unweighted_prdo, build_weighted_prdo
from .graph import ExactOracle, PathRecord, Unreachable, WeightedGraph, load_graph, shortest_path
from .hopset import build_hopset, verify_hopset
from .lowerbound import build_recursive, coverage_experiment, delta_pairs, verify_recursive
from .pairwise import PairNotRegistered, compose_hopset, exact_preserver, pairwise_v2
from .reductions import prioritized_spanner, sourcewise_spanner, subset_spanner
from .tz import build_tz

__version__ = "0.1.0"
