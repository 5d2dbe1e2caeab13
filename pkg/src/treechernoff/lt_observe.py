"""Best scalar linear observation ``y = alpha^T x`` of a Gaussian pair.

Projecting both hypotheses onto ``alpha`` gives two zero-mean scalar
Gaussians whose Chernoff information depends only on their variance ratio,
and grows with it. The optimal ``alpha`` therefore maximizes the generalized
Rayleigh quotient ``alpha^T S1 alpha / alpha^T S2 alpha`` (or its reciprocal),
which is attained at an extreme generalized eigenvector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from treechernoff._linalg import pd_factor
from treechernoff.exceptions import ReductionError
from treechernoff.info_engine import chernoff, scalar_chernoff, scalar_g
from treechernoff.reduction import (
    CanonicalPair,
    canonical_covariances,
    is_common_degree2,
    is_common_leaf,
    lambda_max,
)
from treechernoff.tree_model import GaussianTree, build_covariance

_DEGENERATE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LtSolution:
    """A 1-D observation vector and what it achieves.

    ``ratio`` is the larger of the two projected-variance ratios (always
    ``>= 1``) and ``ci = g(ratio)``. ``alpha`` is ``None`` when every
    direction gives ratio 1, i.e. the two models coincide.
    """

    alpha: np.ndarray | None
    ratio: float
    ci: float
    variances: tuple[float, float] = field(default=(1.0, 1.0))

    @property
    def normalized_alpha(self) -> np.ndarray | None:
        return None if self.alpha is None else normalize_alpha(self.alpha)


def normalize_alpha(alpha) -> np.ndarray:
    """Scale ``alpha`` so its largest-magnitude coordinate equals 1."""
    a = np.asarray(alpha, dtype=float)
    pivot = a[np.argmax(np.abs(a))]
    if pivot == 0.0:
        raise ValueError("alpha must be non-zero")
    return a / pivot


def projected_variances(sigma1, sigma2, alpha) -> tuple[float, float]:
    a = np.asarray(alpha, dtype=float)
    return float(a @ np.asarray(sigma1) @ a), float(a @ np.asarray(sigma2) @ a)


def variance_ratio(sigma1, sigma2, alpha) -> float:
    """``alpha^T sigma1 alpha / alpha^T sigma2 alpha``."""
    v1, v2 = projected_variances(sigma1, sigma2, alpha)
    return v1 / v2


def lt_ci(sigma1, sigma2, alpha) -> float:
    """Chernoff information of the scalar observation ``alpha^T x``."""
    v1, v2 = projected_variances(sigma1, sigma2, alpha)
    return scalar_chernoff(v1, v2)


def optimal_alpha_canonical(cp: CanonicalPair) -> LtSolution:
    """Closed-form optimum ``alpha = [s1, s2, 1]`` for a canonical pair.

    ``s1, s2`` are the roots of ``s^2 + w2 s + (1 - w2^2) / (2 w1 - 2) = 0``;
    swapping them gives the other optimum with the reciprocal ratio. The
    coordinates follow the node order of :func:`reduction.canonical_trees`.
    """
    root = math.sqrt(cp.beta)
    s1 = -0.5 * (cp.w2 + root)
    s2 = -0.5 * (cp.w2 - root)
    lam = lambda_max(cp)
    alpha = np.array([s1, s2, 1.0])
    v = projected_variances(*canonical_covariances(cp), alpha)
    return LtSolution(alpha, lam, scalar_g(lam), v)


def optimize_alpha_numeric(sigma1, sigma2) -> LtSolution:
    """Globally optimal 1-D observation for any positive-definite pair.

    ``sigma2`` is Cholesky-factored and used to whiten ``sigma1``; the extreme
    eigenvectors of the whitened matrix, mapped back, extremize the variance
    ratio. Whichever of ``mu_max`` and ``1 / mu_min`` is larger wins.
    """
    s1 = np.asarray(sigma1, dtype=float)
    s2 = np.asarray(sigma2, dtype=float)
    if s1.shape != s2.shape or s1.ndim != 2:
        raise ValueError(f"shape mismatch: {s1.shape} vs {s2.shape}")
    pd_factor(s1)
    f2 = pd_factor(s2)
    mu, vecs = np.linalg.eigh(f2.whiten(s1))
    if mu[-1] - 1.0 <= _DEGENERATE_TOL and 1.0 - mu[0] <= _DEGENERATE_TOL:
        return LtSolution(None, 1.0, 0.0)
    v = vecs[:, -1] if mu[-1] >= 1.0 / mu[0] else vecs[:, 0]
    alpha = normalize_alpha(linalg.solve_triangular(f2.lower.T, v, lower=False))
    v1, v2 = projected_variances(s1, s2, alpha)
    ratio = max(v1 / v2, v2 / v1)
    return LtSolution(alpha, ratio, scalar_g(ratio), (v1, v2))


def _without(sigma, index: int) -> np.ndarray:
    keep = [r for r in range(np.asarray(sigma).shape[0]) if r != index]
    return np.asarray(sigma, dtype=float)[np.ix_(keep, keep)]


@dataclass(frozen=True)
class ZeroCoordinateReport:
    node: int
    unconstrained_ci: float
    constrained_ci: float
    identical_local_structure: bool

    @property
    def gap(self) -> float:
        return self.unconstrained_ci - self.constrained_ci

    def holds(self, tol: float = 1e-8) -> bool:
        return abs(self.gap) <= tol


def constrained_optimum(sigma1, sigma2, index: int) -> LtSolution:
    """Best 1-D observation with coordinate ``index`` (0-based) forced to zero.

    Returned ``alpha`` is embedded back into the full dimension.
    """
    sol = optimize_alpha_numeric(_without(sigma1, index), _without(sigma2, index))
    if sol.alpha is None:
        return sol
    return LtSolution(np.insert(sol.alpha, index, 0.0), sol.ratio, sol.ci, sol.variances)


def verify_zero_coordinate(
    tree1: GaussianTree, tree2: GaussianTree, node: int, require_identical: bool = True
) -> ZeroCoordinateReport:
    """Compare the best 1-D observation with and without ``alpha[node] = 0``.

    When ``node`` is a leaf or degree-2 node with the same neighbours and
    weights in both trees, some optimal observation ignores it, so the two
    optima coincide. Pass ``require_identical=False`` to run the comparison
    on other nodes too.
    """
    if tree1.n != tree2.n:
        raise ValueError("trees must have the same number of nodes")
    identical = is_common_leaf(tree1, tree2, node) or is_common_degree2(tree1, tree2, node)
    if require_identical and not identical:
        raise ReductionError(f"node {node} does not have identical local structure in both trees")
    s1 = np.asarray(build_covariance(tree1))
    s2 = np.asarray(build_covariance(tree2))
    full = optimize_alpha_numeric(s1, s2)
    constrained = constrained_optimum(s1, s2, node - 1)
    return ZeroCoordinateReport(node, full.ci, constrained.ci, identical)


@dataclass(frozen=True)
class MonotonicityReport:
    p: int
    q: int
    best_q_ci: float
    best_p_ci: float
    min_extension_ci: float
    trials: int

    @property
    def holds(self) -> bool:
        return self.min_extension_ci >= self.best_q_ci - 1e-10


def _map_ci(sigma1, sigma2, rows) -> float:
    m = np.atleast_2d(rows)
    return chernoff(m @ sigma1 @ m.T, m @ sigma2 @ m.T).value


def dimension_monotonicity_check(sigma1, sigma2, p: int, q: int, trials: int = 50, seed=0) -> MonotonicityReport:
    """Check that ``p`` observed dimensions never do worse than ``q < p``.

    The best ``q``-row map is found (exactly for ``q = 1`` and ``q = N``,
    otherwise over random maps and subsets of generalized eigenvectors). It
    is then extended by ``p - q`` random rows ``trials`` times; every
    extension must reach at least the ``q``-row optimum.
    """
    s1 = np.asarray(sigma1, dtype=float)
    s2 = np.asarray(sigma2, dtype=float)
    n = s1.shape[0]
    if not (1 <= q <= p <= n):
        raise ValueError(f"need 1 <= q <= p <= N, got q={q}, p={p}, N={n}")
    rng = np.random.default_rng(seed)

    if q == n:
        best_q, q_rows = chernoff(s1, s2).value, np.eye(n)
    elif q == 1:
        sol = optimize_alpha_numeric(s1, s2)
        q_rows = np.eye(n)[:1] if sol.alpha is None else sol.alpha[None, :]
        best_q = sol.ci
    else:
        f2 = pd_factor(s2)
        mu, vecs = np.linalg.eigh(f2.whiten(s1))
        order = np.argsort(-np.abs(np.log(mu)))
        eig_rows = linalg.solve_triangular(f2.lower.T, vecs, lower=False).T
        candidates = [eig_rows[order[:q]]]
        candidates += [rng.standard_normal((q, n)) for _ in range(trials)]
        scores = [_map_ci(s1, s2, c) for c in candidates]
        best = int(np.argmax(scores))
        best_q, q_rows = scores[best], candidates[best]

    if p == n:
        best_p = chernoff(s1, s2).value
        return MonotonicityReport(p, q, best_q, best_p, best_p, 1)
    if p == q:
        return MonotonicityReport(p, q, best_q, best_q, best_q, 1)
    values = [
        _map_ci(s1, s2, np.vstack([q_rows, rng.standard_normal((p - q, n))]))
        for _ in range(trials)
    ]
    return MonotonicityReport(p, q, best_q, max(values), min(values), trials)
