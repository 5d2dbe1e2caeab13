"""Chernoff information between Gaussian tree models related by a graft."""

from treechernoff.exceptions import (
    GraftError,
    InvalidTreeError,
    ModelError,
    ReductionError,
    TreeParseError,
    TrivialGraftError,
)
from treechernoff.info_engine import (
    ChernoffResult,
    DiscretePmf,
    chernoff,
    discrete_chernoff,
    kl,
    merge_states,
    scalar_chernoff,
    scalar_g,
    sigma_lambda,
)
from treechernoff.lt_observe import LtSolution, optimal_alpha_canonical, optimize_alpha_numeric
from treechernoff.reduction import (
    CanonicalPair,
    canonical_covariances,
    canonical_trees,
    ci_full_closed,
    generalized_eigs,
    lambda_max,
    reduce_pair,
    reduce_trees,
)
from treechernoff.tree_model import (
    CovarianceMatrix,
    GaussianTree,
    GraftedPair,
    build_covariance,
    graft,
    parse_tree,
    path_weight,
    serialize_tree,
    tree_determinant,
    tree_inverse,
)

__version__ = "0.1.0"

__all__ = [
    "build_covariance",
    "canonical_covariances",
    "canonical_trees",
    "CanonicalPair",
    "chernoff",
    "ChernoffResult",
    "ci_full_closed",
    "CovarianceMatrix",
    "discrete_chernoff",
    "DiscretePmf",
    "GaussianTree",
    "generalized_eigs",
    "graft",
    "GraftedPair",
    "GraftError",
    "InvalidTreeError",
    "kl",
    "lambda_max",
    "LtSolution",
    "merge_states",
    "ModelError",
    "optimal_alpha_canonical",
    "optimize_alpha_numeric",
    "parse_tree",
    "path_weight",
    "reduce_pair",
    "reduce_trees",
    "ReductionError",
    "scalar_chernoff",
    "scalar_g",
    "serialize_tree",
    "sigma_lambda",
    "tree_determinant",
    "tree_inverse",
    "TreeParseError",
    "TrivialGraftError",
]
