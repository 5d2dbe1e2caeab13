"""
Reducing a grafted pair to three nodes
======================================

Grafting cuts one edge ``(i, j)`` and reattaches ``j``'s subtree at ``k``.
Nodes that look the same in both trees do not help tell them apart, so
pruning common leaves and contracting common degree-2 nodes leaves a 3-node
pair described by two weights.
"""

import numpy as np

from treechernoff import GaussianTree, build_covariance, chernoff, graft, reduce_pair, reduce_trees
from treechernoff.reduction import canonical_covariances, ci_full_closed, generalized_eigs, lambda_max

tree = GaussianTree(6, [(1, 2, 0.7), (2, 3, 0.8), (3, 4, 0.3), (2, 5, -0.5), (1, 6, 0.4)])
# move leaf 6 from node 1 to node 3
pair = graft(tree, (1, 6), 3)
print("tree1:", pair.tree1.edges)
print("tree2:", pair.tree2.edges)

cp = reduce_pair(pair)
print(f"w1 = {cp.w1:.4g} (path 1-2-3), w2 = {cp.w2:.4g} (moved edge)")

###############################################################################
# The reduction keeps the Chernoff information exactly.

full = chernoff(build_covariance(pair.tree1), build_covariance(pair.tree2)).value
small = chernoff(*canonical_covariances(cp)).value
print(f"CI on 6 nodes = {full:.12g}")
print(f"CI on 3 nodes = {small:.12g}")
print(f"closed form   = {ci_full_closed(cp):.12g}")

t1, t2 = reduce_trees(pair.tree1, pair.tree2)
print("surviving nodes:", t1.labels)

###############################################################################
# The generalized spectrum of the reduced pair is ``{1/l, 1, l}``.

print("eigenvalues:", np.round(generalized_eigs(*canonical_covariances(cp)), 9))
print("lambda_max :", lambda_max(cp))
