"""
Gaussian trees and their covariance
===================================

A tree with unit variances is fully described by one correlation per edge.
The covariance between two nodes is the product of the weights along the
path that joins them.
"""

import numpy as np

from treechernoff import GaussianTree, build_covariance, parse_tree, tree_determinant, tree_inverse

tree = parse_tree(
    """
    nodes 4
    edge 1 2 0.5
    edge 2 3 0.6
    edge 2 4 -0.3
    """
)
sigma = np.asarray(build_covariance(tree))
print(sigma)

# nodes 1 and 3 are joined through node 2
print("cov(1, 3) =", sigma[0, 2], "= 0.5 * 0.6")

###############################################################################
# The determinant is a product over edges and the precision matrix is sparse
# on the tree's edges.

print("det  closed form:", tree_determinant(tree))
print("det  numpy      :", np.linalg.det(sigma))
print(np.round(tree_inverse(tree), 6))
print("max |P S - I| =", np.abs(tree_inverse(tree) @ sigma - np.eye(4)).max())

###############################################################################
# Edges are normalized on construction, so orientation and order do not
# matter.

same = GaussianTree(4, [(4, 2, -0.3), (3, 2, 0.6), (2, 1, 0.5)])
print("equal:", same == tree)
