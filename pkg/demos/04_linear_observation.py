"""
Observing a single linear combination
=====================================

If only ``y = alpha^T x`` can be measured, the best ``alpha`` maximizes the
ratio of projected variances. That is a generalized eigenvalue problem, and
for a 3-node pair it has a closed-form answer.
"""

import numpy as np

from treechernoff import CanonicalPair, canonical_covariances, chernoff
from treechernoff.lt_observe import lt_ci, optimal_alpha_canonical, optimize_alpha_numeric, verify_zero_coordinate
from treechernoff.tree_model import GaussianTree, graft

cp = CanonicalPair(0.5, 0.6)
sigma1, sigma2 = canonical_covariances(cp)

closed = optimal_alpha_canonical(cp)
numeric = optimize_alpha_numeric(sigma1, sigma2)
print("closed-form alpha :", closed.alpha)
print("numeric alpha     :", numeric.normalized_alpha)
print(f"CI1 closed = {closed.ci:.12g}, numeric = {numeric.ci:.12g}")
print(f"CI2 (all three coordinates) = {chernoff(sigma1, sigma2).value:.12g}")

###############################################################################
# Random directions do worse.

rng = np.random.default_rng(0)
random_ci = [lt_ci(sigma1, sigma2, rng.standard_normal(3)) for _ in range(1000)]
print(f"best of 1000 random directions: {max(random_ci):.6g}")

###############################################################################
# A node with the same neighbourhood in both trees can be left out of the
# observation without loss.

tree = GaussianTree(5, [(1, 2, 0.6), (2, 3, 0.7), (3, 4, 0.5), (1, 5, 0.8)])
pair = graft(tree, (3, 4), 1)
for node in (5, 4):
    report = verify_zero_coordinate(pair.tree1, pair.tree2, node, require_identical=False)
    print(f"node {node}: identical={report.identical_local_structure} gap={report.gap:.3g}")
