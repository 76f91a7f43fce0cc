"""Abstract polymer models and the truncated cluster expansion engine."""
from .expansion import (
    BRUTE_FORCE_MAX_POLYMERS,
    ConditionError,
    DecayReport,
    ExpansionResult,
    GuardError,
    approximate_Z,
    brute_force_Z,
    cluster_graph,
    cluster_phi_hat,
    cluster_term,
    default_workers,
    enumerate_clusters,
    enumerate_polymers,
    graded_cluster_sums,
    series_log,
    truncated_expansion,
    truncation_order,
    weight_decay_check,
)
from .universe import Cluster, PolymerUniverse, SubgraphPolymerUniverse, polymers_by_size
from .ursell import (
    IncompatibilityGraph,
    multinomial,
    multiset_graph,
    multiset_phi_hat,
    phi_hat_subsets,
    phi_hat_tutte,
    tutte_evaluate,
    ursell,
)

__all__ = [
    "BRUTE_FORCE_MAX_POLYMERS",
    "Cluster",
    "ConditionError",
    "DecayReport",
    "ExpansionResult",
    "GuardError",
    "IncompatibilityGraph",
    "PolymerUniverse",
    "SubgraphPolymerUniverse",
    "approximate_Z",
    "brute_force_Z",
    "cluster_graph",
    "cluster_phi_hat",
    "cluster_term",
    "default_workers",
    "enumerate_clusters",
    "enumerate_polymers",
    "graded_cluster_sums",
    "multinomial",
    "multiset_graph",
    "multiset_phi_hat",
    "phi_hat_subsets",
    "phi_hat_tutte",
    "polymers_by_size",
    "series_log",
    "truncated_expansion",
    "truncation_order",
    "tutte_evaluate",
    "ursell",
    "weight_decay_check",
]
