"""Shared positive-definite factorization used by the divergence code."""

from __future__ import annotations

import numpy as np
from scipy import linalg


class NotPositiveDefiniteError(ValueError):
    """Raised when a matrix that must be positive definite is not."""


class PDFactor:
    """Cholesky factor of a symmetric positive-definite matrix.

    Every log-determinant, solve and inverse inside the divergence engine goes
    through this class, so those quantities never touch the tree closed forms.
    """

    def __init__(self, a):
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix has non-finite entries")
        try:
            self._cf = linalg.cho_factor(a, lower=True, check_finite=False)
        except linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError("matrix is not positive definite") from exc
        self.dim = a.shape[0]

    @property
    def lower(self) -> np.ndarray:
        return np.tril(self._cf[0])

    def logdet(self) -> float:
        return 2.0 * float(np.sum(np.log(np.diag(self._cf[0]))))

    def solve(self, b) -> np.ndarray:
        return linalg.cho_solve(self._cf, np.asarray(b, dtype=float), check_finite=False)

    def inverse(self) -> np.ndarray:
        inv = self.solve(np.eye(self.dim))
        return 0.5 * (inv + inv.T)

    def whiten(self, a) -> np.ndarray:
        """Return ``L^-1 a L^-T`` for the lower factor ``L``."""
        low = self.lower
        left = linalg.solve_triangular(low, np.asarray(a, dtype=float), lower=True)
        out = linalg.solve_triangular(low, left.T, lower=True)
        return 0.5 * (out + out.T)


def pd_factor(a) -> PDFactor:
    return PDFactor(a)
