"""Chernoff-preserving reductions of grafted tree pairs.

Nodes whose neighbourhood is identical in both trees carry no information
for telling the trees apart. Common leaves can be deleted and common degree-2
nodes contracted into a single edge; repeating both on a grafted pair leaves
a 3-node skeleton described by two numbers:

* ``w2``, the weight of the moved edge, and
* ``w1``, the path weight between the old and new attachment points.

For that skeleton the generalized spectrum of the covariance pair is
``{1, lambda_max, 1/lambda_max}`` and both the full-observation and the
best 1-D projection Chernoff information are functions of ``lambda_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from treechernoff._linalg import pd_factor
from treechernoff.exceptions import ReductionError, TrivialGraftError
from treechernoff.tree_model import GaussianTree, GraftedPair, build_covariance

TreePair = tuple[GaussianTree, GaussianTree]


@dataclass(frozen=True)
class CanonicalPair:
    """Parameters ``(w1, w2)`` of the reduced 3-node pair.

    ``w2`` is stored as ``|w2|``: flipping the sign of the moved node maps
    both covariances by the same similarity, so nothing depends on its sign.
    """

    w1: float
    w2: float

    def __post_init__(self):
        w1, w2 = float(self.w1), float(self.w2)
        if not (math.isfinite(w1) and abs(w1) < 1.0):
            raise ReductionError(f"w1 must satisfy |w1| < 1, got {w1!r}")
        if not (math.isfinite(w2) and 0.0 < abs(w2) < 1.0):
            raise ReductionError(f"w2 must satisfy 0 < |w2| < 1, got {w2!r}")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", abs(w2))

    @property
    def beta(self) -> float:
        w2sq = self.w2 * self.w2
        return w2sq + 2.0 * (1.0 - w2sq) / (1.0 - self.w1)

    @property
    def lambda_max(self) -> float:
        return lambda_max(self)


def canonical_trees(cp: CanonicalPair, w2: float | None = None) -> TreePair:
    """The two 3-node trees of a canonical pair.

    Node order is ``(k, i, j)``: node 3 hangs off node 2 in the first tree
    and off node 1 in the second, and nodes 1-2 share the edge ``w1``.
    ``w2`` may be passed to override the stored (non-negative) weight.
    """
    w2 = cp.w2 if w2 is None else w2
    t1 = GaussianTree(3, [(1, 2, cp.w1), (2, 3, w2)])
    t2 = GaussianTree(3, [(1, 2, cp.w1), (1, 3, w2)])
    return t1, t2


def canonical_covariances(cp: CanonicalPair, w2: float | None = None):
    t1, t2 = canonical_trees(cp, w2)
    return np.asarray(build_covariance(t1)), np.asarray(build_covariance(t2))


def _drop_node(tree: GaussianTree, node: int, new_edges) -> GaussianTree:
    """Remove ``node``, renumber the rest densely and keep original labels."""
    remap = {v: (v if v < node else v - 1) for v in range(1, tree.n + 1) if v != node}
    edges = [(remap[a], remap[b], w) for a, b, w in new_edges]
    labels = [tree.label(v) for v in range(1, tree.n + 1) if v != node]
    return GaussianTree(tree.n - 1, edges, labels=labels)


def _check_pair(tree1: GaussianTree, tree2: GaussianTree):
    if tree1.n != tree2.n:
        raise ReductionError(f"trees have different node counts ({tree1.n} vs {tree2.n})")
    if tree1.n < 3:
        raise ReductionError("cannot remove a node from a 2-node pair")


def is_common_leaf(tree1: GaussianTree, tree2: GaussianTree, node: int) -> bool:
    nb1, nb2 = tree1.neighbors(node), tree2.neighbors(node)
    return len(nb1) == 1 and nb1 == nb2


def is_common_degree2(tree1: GaussianTree, tree2: GaussianTree, node: int) -> bool:
    nb1, nb2 = tree1.neighbors(node), tree2.neighbors(node)
    return len(nb1) == 2 and nb1 == nb2


def prune_common_leaf(tree1: GaussianTree, tree2: GaussianTree, node: int) -> TreePair:
    """Delete a leaf that hangs off the same neighbour with the same weight in both trees."""
    _check_pair(tree1, tree2)
    if not is_common_leaf(tree1, tree2, node):
        raise ReductionError(f"node {node} is not a leaf with identical attachment in both trees")
    return tuple(
        _drop_node(t, node, [e for e in t.edges if node not in e[:2]]) for t in (tree1, tree2)
    )


def contract_common_degree2(tree1: GaussianTree, tree2: GaussianTree, node: int) -> TreePair:
    """Replace a shared degree-2 node ``p - i - q`` by the edge ``p - q`` of weight ``w_ip * w_iq``."""
    _check_pair(tree1, tree2)
    if not is_common_degree2(tree1, tree2, node):
        raise ReductionError(
            f"node {node} does not have degree 2 with identical neighbours and weights in both trees"
        )
    (p, wp), (q, wq) = sorted(tree1.neighbors(node).items())
    out = []
    for t in (tree1, tree2):
        edges = [e for e in t.edges if node not in e[:2]]
        edges.append((p, q, wp * wq))
        out.append(_drop_node(t, node, edges))
    return tuple(out)


def reduce_trees(tree1: GaussianTree, tree2: GaussianTree) -> TreePair:
    """Apply pruning and contraction until neither applies.

    Common leaves are pruned to a fixpoint, then common degree-2 nodes are
    contracted to a fixpoint, and the two passes repeat; within a pass the
    smallest eligible node id goes first. Surviving nodes keep their original
    names in ``labels``.
    """
    t1, t2 = tree1, tree2
    if t1.labels is None:
        names = [str(v) for v in range(1, t1.n + 1)]
        t1 = GaussianTree(t1.n, t1.edges, labels=names)
        t2 = GaussianTree(t2.n, t2.edges, labels=names)
    changed = True
    while changed:
        changed = False
        for step, test in ((prune_common_leaf, is_common_leaf), (contract_common_degree2, is_common_degree2)):
            while t1.n > 2:
                node = next((v for v in range(1, t1.n + 1) if test(t1, t2, v)), None)
                if node is None:
                    break
                t1, t2 = step(t1, t2, node)
                changed = True
    return t1, t2


def reduce_pair(pair: GraftedPair) -> CanonicalPair:
    """Canonical ``(w1, w2)`` of a grafted pair."""
    if pair.is_trivial:
        raise TrivialGraftError("trivial graft (attach node equals the old parent): the trees coincide")
    return CanonicalPair(pair.w1, pair.w2)


def lambda_max(cp: CanonicalPair) -> float:
    """Largest generalized eigenvalue ``(sqrt(beta) + w2) / (sqrt(beta) - w2)``."""
    root = math.sqrt(cp.beta)
    return (root + cp.w2) / (root - cp.w2)


def generalized_eigs(sigma1, sigma2) -> list[float]:
    """Sorted eigenvalues of ``inv(sigma2) @ sigma1`` for a canonical 3x3 pair.

    The known root 1 is divided out of the characteristic cubic and the
    remaining quadratic is solved directly. Use :func:`generalized_eigs_generic`
    for other shapes.
    """
    a1 = np.asarray(sigma1, dtype=float)
    a2 = np.asarray(sigma2, dtype=float)
    if a1.shape != (3, 3) or a2.shape != (3, 3):
        raise ValueError("generalized_eigs expects 3x3 matrices; use generalized_eigs_generic")
    s = pd_factor(a2).solve(a1)
    c1 = float(np.trace(s))
    c2 = float(
        s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0]
        + s[0, 0] * s[2, 2] - s[0, 2] * s[2, 0]
        + s[1, 1] * s[2, 2] - s[1, 2] * s[2, 1]
    )
    c3 = float(np.linalg.det(s))
    # char poly x^3 - c1 x^2 + c2 x - c3 must vanish at x = 1
    residual = 1.0 - c1 + c2 - c3
    if abs(residual) > 1e-8 * max(1.0, abs(c1), abs(c2), abs(c3)):
        raise ValueError("1 is not a generalized eigenvalue; not a canonical grafted pair")
    # x^3 - c1 x^2 + c2 x - c3 = (x - 1)(x^2 - (c1 - 1) x + c3)
    total, prod = c1 - 1.0, c3
    disc = max(total * total - 4.0 * prod, 0.0)
    big = 0.5 * (total + math.sqrt(disc))
    small = prod / big
    return sorted([small, 1.0, big])


def generalized_eigs_generic(sigma1, sigma2) -> np.ndarray:
    """All eigenvalues of ``L^-1 sigma1 L^-T`` with ``sigma2 = L L^T``, ascending."""
    f2 = pd_factor(np.asarray(sigma2, dtype=float))
    return np.linalg.eigvalsh(f2.whiten(sigma1))


def ci_full_closed(cp: CanonicalPair) -> float:
    """Full-observation Chernoff information ``ln((lam + 1) / (2 sqrt(lam)))``."""
    lam = lambda_max(cp)
    root = math.sqrt(lam)
    return math.log1p((root - 1.0) ** 2 / (2.0 * root))


def ci_full_closed_weights(cp: CanonicalPair) -> float:
    """Same quantity written in the weights: ``ln(1 + w2^2 (1 - w1) / (2 (1 - w2^2))) / 2``."""
    w2sq = cp.w2 * cp.w2
    return 0.5 * math.log1p(0.5 * w2sq / (1.0 - w2sq) * (1.0 - cp.w1))
