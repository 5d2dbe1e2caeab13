"""KL divergence and Chernoff information for zero-mean Gaussians.

The multivariate Chernoff information is located on the exponential-family
curve whose precision is ``lam * P1 + (1 - lam) * P2``; the optimal ``lam``
is the point where the KL divergences from that curve to both endpoints are
equal, found here by bisection. Scalar and discrete variants live alongside.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize

from treechernoff._linalg import PDFactor, pd_factor

LAMBDA_TOL = 1e-12
MAX_BISECTION_ITER = 200
TAYLOR_RADIUS = 1e-6


@dataclass(frozen=True)
class ChernoffResult:
    """Outcome of :func:`chernoff`.

    Attributes
    ----------
    lambda_star : float
        Interpolation weight in ``[0, 1]`` at which the two KL divergences meet.
    value : float
        Chernoff information, equal to ``kl_to_2``.
    kl_to_1, kl_to_2 : float
        ``D(Sigma_lambda* || Sigma_1)`` and ``D(Sigma_lambda* || Sigma_2)``.
    iterations : int
        Bisection steps taken.
    """

    lambda_star: float
    value: float
    kl_to_1: float
    kl_to_2: float
    iterations: int = 0


def _as_pd(sigma, name: str) -> tuple[np.ndarray, PDFactor]:
    a = np.asarray(sigma, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    return a, pd_factor(a)


def _check_pair(sigma1, sigma2):
    a1, f1 = _as_pd(sigma1, "sigma1")
    a2, f2 = _as_pd(sigma2, "sigma2")
    if a1.shape != a2.shape:
        raise ValueError(f"dimension mismatch: {a1.shape} vs {a2.shape}")
    return a1, f1, a2, f2


def _kl(a1: np.ndarray, f1: PDFactor, f2: PDFactor) -> float:
    n = a1.shape[0]
    trace = float(np.trace(f2.solve(a1)))
    return 0.5 * (f2.logdet() - f1.logdet()) + 0.5 * trace - 0.5 * n


def kl(sigma1, sigma2) -> float:
    """KL divergence ``D(N(0, sigma1) || N(0, sigma2))``."""
    a1, f1, _, f2 = _check_pair(sigma1, sigma2)
    return max(_kl(a1, f1, f2), 0.0)


def _precisions(f1: PDFactor, f2: PDFactor):
    return f1.inverse(), f2.inverse()


def sigma_lambda(sigma1, sigma2, lam: float) -> np.ndarray:
    """Covariance whose precision is ``lam * inv(sigma1) + (1 - lam) * inv(sigma2)``.

    The result is positive definite but in general not unit-diagonal, so it
    is returned as a plain array.
    """
    if not (0.0 <= lam <= 1.0):
        raise ValueError(f"lambda must lie in [0, 1], got {lam!r}")
    _, f1, _, f2 = _check_pair(sigma1, sigma2)
    p1, p2 = _precisions(f1, f2)
    return _interpolate(p1, p2, lam)


def _interpolate(p1, p2, lam):
    prec = lam * p1 + (1.0 - lam) * p2
    return pd_factor(0.5 * (prec + prec.T)).inverse()


def chernoff(sigma1, sigma2) -> ChernoffResult:
    """Chernoff information between ``N(0, sigma1)`` and ``N(0, sigma2)``.

    Bisects ``h(lam) = D(S_lam || sigma1) - D(S_lam || sigma2)``, which is
    positive at ``lam = 0`` and negative at ``lam = 1`` for distinct inputs.
    Equal inputs return zero with ``lambda_star = 0.5``.
    """
    a1, f1, a2, f2 = _check_pair(sigma1, sigma2)
    if np.array_equal(a1, a2):
        return ChernoffResult(0.5, 0.0, 0.0, 0.0, 0)
    p1, p2 = _precisions(f1, f2)

    def divergences(lam):
        s = _interpolate(p1, p2, lam)
        fs = pd_factor(s)
        return _kl(s, fs, f1), _kl(s, fs, f2)

    lo, hi = 0.0, 1.0
    d_lo = divergences(lo)
    d_hi = divergences(hi)
    h_lo, h_hi = d_lo[0] - d_lo[1], d_hi[0] - d_hi[1]
    if not (h_lo > 0.0 and h_hi < 0.0):
        # numerically indistinguishable inputs
        return ChernoffResult(0.5, 0.0, 0.0, 0.0, 0)
    iterations = 0
    while hi - lo > LAMBDA_TOL and iterations < MAX_BISECTION_ITER:
        mid = 0.5 * (lo + hi)
        d1, d2 = divergences(mid)
        if d1 - d2 > 0.0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    lam = 0.5 * (lo + hi)
    d1, d2 = divergences(lam)
    return ChernoffResult(lam, max(d2, 0.0), max(d1, 0.0), max(d2, 0.0), iterations)


def chernoff_min_pairwise(sigmas: Sequence) -> float:
    """Smallest pairwise Chernoff information over a list of models.

    This is the error exponent of uniform-prior m-ary testing among them.
    """
    if len(sigmas) < 2:
        raise ValueError("need at least two models")
    return min(
        chernoff(sigmas[a], sigmas[b]).value
        for a in range(len(sigmas))
        for b in range(a + 1, len(sigmas))
    )


def scalar_g(x: float) -> float:
    """Chernoff information between ``N(0, 1)`` and ``N(0, x)``.

    ``g(x) = (r - 1 - ln r) / 2`` with ``r = ln(x) / (x - 1)``, which is the
    usual ``(ln((x-1)/(e ln x)) + ln(x)/(x-1)) / 2`` rearranged to avoid
    cancellation. Symmetric under ``x -> 1/x``; ``(x - 1)**2 / 16`` is used
    within 1e-6 of 1.
    """
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise ValueError(f"variance ratio must be positive and finite, got {x!r}")
    t = x - 1.0
    if abs(t) < TAYLOR_RADIUS:
        return t * t / 16.0
    # r - 1 computed without forming r to keep precision near x = 1
    u = (math.log1p(t) - t) / t if abs(t) < 0.5 else math.log(x) / t - 1.0
    return 0.5 * (u - math.log1p(u))


def scalar_chernoff(var1: float, var2: float) -> float:
    """Chernoff information between ``N(0, var1)`` and ``N(0, var2)``."""
    if not (var1 > 0.0 and var2 > 0.0):
        raise ValueError(f"variances must be positive, got {var1!r}, {var2!r}")
    return scalar_g(var2 / var1)


@dataclass(frozen=True)
class DiscretePmf:
    """Probability mass function on ``len(probs)`` states."""

    probs: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(v) for v in self.probs)
        if not p:
            raise ValueError("PMF needs at least one state")
        if any(not math.isfinite(v) or v < 0.0 for v in p):
            raise ValueError("PMF entries must be finite and non-negative")
        if abs(math.fsum(p) - 1.0) > 1e-12:
            raise ValueError(f"PMF sums to {math.fsum(p)!r}, not 1")
        object.__setattr__(self, "probs", p)

    def __len__(self):
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.array(self.probs)


def discrete_chernoff(p: DiscretePmf, q: DiscretePmf) -> float:
    """Chernoff information ``-min ln sum(p**lam * q**(1-lam))`` over ``lam`` in [0, 1].

    States where only one PMF has mass drop out for ``0 < lam < 1``; fully
    disjoint supports give ``inf``.
    """
    if len(p) != len(q):
        raise ValueError(f"PMFs have different support sizes ({len(p)} vs {len(q)})")
    pa, qa = p.as_array(), q.as_array()
    both = (pa > 0) & (qa > 0)
    if not np.any(both):
        return math.inf
    pa, qa = pa[both], qa[both]
    if np.array_equal(pa, qa):
        return 0.0
    lp, lq = np.log(pa), np.log(qa)

    def log_energy(lam):
        return float(np.log(np.sum(np.exp(lam * lp + (1.0 - lam) * lq))))

    res = optimize.minimize_scalar(log_energy, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10})
    fmin = float(res.fun)
    # endpoints give ln(mass on the shared support) <= 0
    fmin = min(fmin, log_energy(0.0), log_energy(1.0))
    return max(-fmin, 0.0)


def merge_states(p: DiscretePmf, i: int, j: int) -> DiscretePmf:
    """Combine states ``i`` and ``j`` (0-based) into one, placed at ``min(i, j)``."""
    m = len(p)
    if not (0 <= i < m and 0 <= j < m):
        raise IndexError(f"state indices {i}, {j} outside 0..{m - 1}")
    if i == j:
        raise ValueError("cannot merge a state with itself")
    lo, hi = min(i, j), max(i, j)
    probs = list(p.probs)
    probs[lo] = probs[lo] + probs[hi]
    del probs[hi]
    return DiscretePmf(tuple(probs))


def format_matrix_csv(matrix) -> str:
    """Row-major CSV rendering of a matrix, 17 significant digits."""
    buf = io.StringIO()
    for row in np.atleast_2d(np.asarray(matrix, dtype=float)):
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()
