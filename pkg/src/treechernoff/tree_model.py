"""Normalized Gaussian trees and their covariance matrices.

A tree on nodes ``1..n`` carries one correlation weight per edge. With unit
variances the covariance between two nodes is the product of the weights on
the path joining them, and both the determinant and the precision matrix have
closed forms in the edge weights alone.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from treechernoff.exceptions import GraftError, InvalidTreeError, TreeParseError, TrivialGraftError

Edge = tuple[int, int, float]


@dataclass(frozen=True)
class GaussianTree:
    """A weighted spanning tree on nodes ``1..n``.

    Edges are normalized on construction to ``(min(i, j), max(i, j), w)`` and
    sorted, so two trees with the same edge set compare equal regardless of
    the order or orientation the edges were given in.

    Parameters
    ----------
    n : int
        Number of nodes, at least 2.
    edges : iterable of (i, j, w)
        Exactly ``n - 1`` edges forming a spanning tree, ``0 < |w| < 1``.
    labels : sequence of str, optional
        Original node names, ``labels[id - 1]``. Not part of equality.
    """

    n: int
    edges: tuple[Edge, ...]
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        n = self.n
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2:
            raise InvalidTreeError(f"node count must be an integer >= 2, got {n!r}")
        object.__setattr__(self, "n", int(n))
        normalized = []
        seen = set()
        for edge in self.edges:
            try:
                i, j, w = edge
            except (TypeError, ValueError):
                raise InvalidTreeError(f"edge must be an (i, j, w) triple, got {edge!r}") from None
            i, j, w = int(i), int(j), float(w)
            if not (1 <= i <= n and 1 <= j <= n):
                raise InvalidTreeError(f"edge ({i}, {j}) references a node outside 1..{n}")
            if i == j:
                raise InvalidTreeError(f"self-loop at node {i}")
            if not (math.isfinite(w) and 0.0 < abs(w) < 1.0):
                raise InvalidTreeError(f"edge ({i}, {j}) weight {w!r} outside 0 < |w| < 1")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InvalidTreeError(f"duplicate edge {key}")
            seen.add(key)
            normalized.append((key[0], key[1], w))
        if len(normalized) != n - 1:
            raise InvalidTreeError(
                f"a tree on {n} nodes needs {n - 1} edges, got {len(normalized)} (not connected or has a cycle)"
            )
        normalized.sort()
        object.__setattr__(self, "edges", tuple(normalized))
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != n or len(set(labels)) != n:
                raise InvalidTreeError("labels must be n distinct names")
            object.__setattr__(self, "labels", labels)
        # n - 1 distinct edges plus connectivity rules out cycles
        reached = _component(self.adjacency, 1)
        if len(reached) != n:
            missing = sorted(set(range(1, n + 1)) - reached)
            raise InvalidTreeError(f"tree is not connected; unreachable from node 1: {missing}")

    @cached_property
    def adjacency(self) -> dict[int, dict[int, float]]:
        adj: dict[int, dict[int, float]] = {v: {} for v in range(1, self.n + 1)}
        for i, j, w in self.edges:
            adj[i][j] = w
            adj[j][i] = w
        return adj

    def neighbors(self, node: int) -> dict[int, float]:
        """Map of neighbor id to edge weight."""
        self._check_node(node)
        return dict(self.adjacency[node])

    def degree(self, node: int) -> int:
        self._check_node(node)
        return len(self.adjacency[node])

    def weight(self, i: int, j: int) -> float | None:
        return self.adjacency.get(i, {}).get(j)

    def label(self, node: int) -> str:
        self._check_node(node)
        return str(node) if self.labels is None else self.labels[node - 1]

    def node_of(self, label) -> int:
        """Node id for an external label (or an id when the tree has no labels)."""
        if self.labels is not None and str(label) in self.labels:
            return self.labels.index(str(label)) + 1
        try:
            node = int(label)
        except (TypeError, ValueError):
            raise InvalidTreeError(f"unknown node {label!r}") from None
        self._check_node(node)
        return node

    def leaves(self) -> list[int]:
        return [v for v, nb in self.adjacency.items() if len(nb) == 1]

    def _check_node(self, node):
        if not (isinstance(node, (int, np.integer)) and 1 <= node <= self.n):
            raise InvalidTreeError(f"node {node!r} outside 1..{self.n}")


def _component(adj, start, banned_edge=None) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if banned_edge is not None and {u, v} == set(banned_edge):
                continue
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return seen


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Unit-diagonal symmetric positive-definite correlation matrix.

    ``entries`` is stored as a read-only array. Instances convert to numpy
    arrays transparently, so they can be passed anywhere an array is expected.
    """

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidTreeError(f"covariance must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidTreeError("covariance has non-finite entries")
        if not np.allclose(a, a.T, rtol=0.0, atol=1e-12):
            raise InvalidTreeError("covariance is not symmetric")
        a = 0.5 * (a + a.T)
        if not np.allclose(np.diag(a), 1.0, rtol=0.0, atol=1e-12):
            raise InvalidTreeError("covariance must have unit diagonal")
        np.fill_diagonal(a, 1.0)
        off = a[~np.eye(a.shape[0], dtype=bool)]
        if off.size and np.max(np.abs(off)) >= 1.0:
            raise InvalidTreeError("off-diagonal entries must satisfy |sigma_ij| < 1")
        try:
            np.linalg.cholesky(a)
        except np.linalg.LinAlgError:
            raise InvalidTreeError("covariance is not positive definite") from None
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries.copy() if copy else self.entries
        return self.entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, CovarianceMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None


def build_covariance(tree: GaussianTree) -> CovarianceMatrix:
    """Covariance of the Gaussian tree: path products of edge weights."""
    n = tree.n
    adj = tree.adjacency
    cov = np.eye(n)
    for root in range(1, n + 1):
        # walk outward from root carrying the running product
        stack = [(root, 0, 1.0)]
        while stack:
            v, parent, prod = stack.pop()
            cov[root - 1, v - 1] = prod
            for u, w in adj[v].items():
                if u != parent:
                    stack.append((u, v, prod * w))
    # mirror the upper triangle so symmetry is exact
    upper = np.triu(cov, 1)
    cov = upper + upper.T + np.eye(n)
    return CovarianceMatrix(cov)


def tree_determinant(tree: GaussianTree) -> float:
    """Determinant of the tree covariance, ``prod(1 - w**2)`` over edges.

    Factors are multiplied in sorted order so the result depends only on the
    weight multiset, bit-for-bit.
    """
    return math.prod(sorted(1.0 - w * w for _, _, w in tree.edges))


def tree_inverse(tree: GaussianTree) -> np.ndarray:
    """Precision matrix of the tree covariance in closed form.

    Off-diagonal entries are ``-w / (1 - w**2)`` on edges and zero elsewhere;
    the diagonal is ``1 + sum(w**2 / (1 - w**2))`` over incident edges.
    """
    prec = np.eye(tree.n)
    for i, j, w in tree.edges:
        d = 1.0 - w * w
        prec[i - 1, j - 1] = prec[j - 1, i - 1] = -w / d
        prec[i - 1, i - 1] += w * w / d
        prec[j - 1, j - 1] += w * w / d
    return prec


def path_nodes(tree: GaussianTree, a: int, b: int) -> list[int]:
    """Nodes on the unique path from ``a`` to ``b``, both ends included."""
    tree._check_node(a)
    tree._check_node(b)
    parent = {a: 0}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        if v == b:
            break
        for u in tree.adjacency[v]:
            if u not in parent:
                parent[u] = v
                queue.append(u)
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    return path[::-1]


def path_weight(tree: GaussianTree, a: int, b: int) -> float:
    """Product of edge weights along the path from ``a`` to ``b`` (1 if ``a == b``)."""
    nodes = path_nodes(tree, a, b)
    return math.prod(tree.adjacency[u][v] for u, v in zip(nodes, nodes[1:]))


@dataclass(frozen=True)
class GraftedPair:
    """Two trees one grafting operation apart.

    ``tree2`` is ``tree1`` with edge ``(i, j)`` replaced by ``(k, j)`` at the
    same weight. ``w2`` is that weight and ``w1`` the path weight from ``i``
    to ``k`` in ``tree1``.
    """

    tree1: GaussianTree
    tree2: GaussianTree
    cut_edge: tuple[int, int]
    attach_node: int
    w2: float
    w1: float

    @property
    def is_trivial(self) -> bool:
        return self.attach_node == self.cut_edge[0]


def graft(tree: GaussianTree, cut: tuple[int, int], attach: int) -> GraftedPair:
    """Cut edge ``(i, j)`` and reattach the subtree containing ``j`` at ``attach``.

    The node ``attach`` must lie on the ``i`` side of the cut. ``attach == i``
    is allowed and gives ``tree2 == tree1`` with ``w1 = 1``.
    """
    i, j = (int(x) for x in cut)
    k = int(attach)
    w2 = tree.weight(i, j)
    if w2 is None:
        raise GraftError(f"({i}, {j}) is not an edge of the tree")
    tree._check_node(k)
    kept_side = _component(tree.adjacency, i, banned_edge=(i, j))
    if k not in kept_side:
        raise GraftError(
            f"attach node {k} lies in the subtree severed with node {j}; the result would not be a tree"
        )
    w1 = path_weight(tree, i, k)
    if k == i:
        return GraftedPair(tree, tree, (i, j), k, w2, w1)
    edges = [e for e in tree.edges if {e[0], e[1]} != {i, j}]
    edges.append((k, j, w2))
    tree2 = GaussianTree(tree.n, edges, labels=tree.labels)
    return GraftedPair(tree, tree2, (i, j), k, w2, w1)


def detect_graft(tree1: GaussianTree, tree2: GaussianTree) -> GraftedPair:
    """Recover the grafting operation relating two trees.

    The weighted edge sets must differ by exactly one removed edge ``(i, j, w)``
    and one added edge ``(k, j, w)`` sharing the endpoint ``j``.
    """
    if tree1.n != tree2.n:
        raise GraftError(f"trees have different node counts ({tree1.n} vs {tree2.n})")
    set1, set2 = set(tree1.edges), set(tree2.edges)
    removed, added = sorted(set1 - set2), sorted(set2 - set1)
    if not removed:
        raise TrivialGraftError("trivial graft: the two trees are identical")
    if len(removed) != 1 or len(added) != 1:
        raise GraftError(
            f"trees differ by {len(removed)} removed and {len(added)} added edges; "
            "a single graft changes exactly one edge"
        )
    (a, b, w), (c, d, w_new) = removed[0], added[0]
    if w != w_new:
        raise GraftError(f"moved edge changes weight ({w!r} -> {w_new!r}); a graft keeps it")
    shared = {a, b} & {c, d}
    if len(shared) != 1:
        raise GraftError("removed and added edges must share exactly one endpoint")
    (j,) = shared
    i = a if b == j else b
    k = c if d == j else d
    pair = graft(tree1, (i, j), k)
    if pair.tree2 != tree2:  # pragma: no cover - guaranteed by the edge diff
        raise GraftError("edge difference does not describe a graft")
    return pair


def random_tree(n: int, rng=None, low: float = 0.05, high: float = 0.95) -> GaussianTree:
    """Random tree by uniform attachment with weights uniform on ``±[low, high]``."""
    rng = np.random.default_rng(rng)
    edges = []
    for v in range(2, n + 1):
        parent = int(rng.integers(1, v))
        w = rng.uniform(low, high) * (1.0 if rng.random() < 0.5 else -1.0)
        edges.append((parent, v, w))
    return GaussianTree(n, edges)


def random_graft(tree: GaussianTree, rng=None) -> GraftedPair:
    """Apply a uniformly chosen non-trivial graft to ``tree``."""
    rng = np.random.default_rng(rng)
    choices = []
    for a, b, _ in tree.edges:
        for i, j in ((a, b), (b, a)):
            side = _component(tree.adjacency, i, banned_edge=(i, j))
            choices.extend((i, j, k) for k in sorted(side) if k != i)
    if not choices:
        raise GraftError("tree admits no non-trivial graft")
    i, j, k = choices[int(rng.integers(len(choices)))]
    return graft(tree, (i, j), k)


_INT = re.compile(r"[+-]?\d+")


def parse_tree(text: str) -> GaussianTree:
    """Parse the ``nodes N`` / ``edge I J W`` text format.

    Node names may be any whitespace-free tokens. If they are exactly the
    integers ``1..N`` they are used as ids; otherwise they are numbered in
    order of first appearance and kept as ``labels``.
    """
    n = None
    raw_edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split("#", 1)[0].split()
        if not tokens:
            continue
        if n is None:
            if len(tokens) != 2 or tokens[0] != "nodes":
                raise TreeParseError("expected 'nodes N' as the first statement", lineno)
            try:
                n = int(tokens[1])
            except ValueError:
                raise TreeParseError(f"node count {tokens[1]!r} is not an integer", lineno) from None
            if n < 2:
                raise InvalidTreeError(f"node count must be >= 2, got {n}", lineno)
            continue
        if tokens[0] != "edge" or len(tokens) != 4:
            raise TreeParseError("expected 'edge I J W'", lineno)
        try:
            w = float(tokens[3])
        except ValueError:
            raise TreeParseError(f"weight {tokens[3]!r} is not a number", lineno) from None
        if not (math.isfinite(w) and 0.0 < abs(w) < 1.0):
            raise InvalidTreeError(f"weight {w!r} outside 0 < |w| < 1", lineno)
        raw_edges.append((tokens[1], tokens[2], w, lineno))
    if n is None:
        raise TreeParseError("missing 'nodes N' line")

    names = []
    for a, b, _, _ in raw_edges:
        for x in (a, b):
            if x not in names:
                names.append(x)
    identity = all(_INT.fullmatch(x) for x in names) and {int(x) for x in names} <= set(range(1, n + 1))
    if identity:
        ids = {x: int(x) for x in names}
        labels = None
    else:
        if len(names) > n:
            raise InvalidTreeError(f"{len(names)} distinct node names for {n} nodes")
        ids = {x: pos + 1 for pos, x in enumerate(names)}
        labels = names + [f"_{pos}" for pos in range(len(names) + 1, n + 1)]

    seen = {}
    edges = []
    for a, b, w, lineno in raw_edges:
        i, j = ids[a], ids[b]
        if i == j:
            raise InvalidTreeError(f"self-loop at node {a}", lineno)
        key = (min(i, j), max(i, j))
        if key in seen:
            raise InvalidTreeError(f"duplicate edge {a}-{b} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        edges.append((i, j, w))
    return GaussianTree(n, edges, labels=labels)


def serialize_tree(tree: GaussianTree) -> str:
    """Text form of ``tree``; edges sorted, weights to 17 significant digits."""
    lines = [f"nodes {tree.n}"]
    lines += [f"edge {i} {j} {w:.17g}" for i, j, w in tree.edges]
    return "\n".join(lines) + "\n"

