"""Order finding, width computation and hardness gadgets for read-once oblivious ABPs over prime fields."""

from .ffield import DEFAULT_PRIME, FieldElement, PrimeField
from .nisan import (
    RankCache,
    RankTestReport,
    VarSubset,
    exact_rank,
    exact_width_in_order,
    nisan_matrix,
    nisan_rank,
    prob_rank_at_most,
)
from .orderfind import (
    NoPathFailure,
    OrderResult,
    brute_force_best_order,
    find_order,
    min_width_search,
    populate_graph,
)
from .poly import DensePoly, PolyOracle, SparsePoly, dense_oracle, sparse_oracle
from .roabp import Roabp, roabp_to_dense, sample_random_roabp

__all__ = [
    "DEFAULT_PRIME",
    "DensePoly",
    "FieldElement",
    "NoPathFailure",
    "OrderResult",
    "PolyOracle",
    "PrimeField",
    "RankCache",
    "RankTestReport",
    "Roabp",
    "SparsePoly",
    "VarSubset",
    "brute_force_best_order",
    "dense_oracle",
    "exact_rank",
    "exact_width_in_order",
    "find_order",
    "min_width_search",
    "nisan_matrix",
    "nisan_rank",
    "populate_graph",
    "prob_rank_at_most",
    "roabp_to_dense",
    "sample_random_roabp",
    "sparse_oracle",
]
