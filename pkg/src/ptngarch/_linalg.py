"""Direct small-matrix linear algebra for the 5x5 information matrices.

A hand-rolled Cholesky keeps the failure mode explicit: a non-positive
pivot names the first coordinate whose information is (numerically)
degenerate, which is the useful diagnostic for unidentified coefficients.
Nothing here is tuned for matrices beyond ~10x10.
"""

from __future__ import annotations

import numpy as np

PIVOT_TOL = 1e-12


class SingularMatrixError(RuntimeError):
    """Raised when a Cholesky pivot falls below tolerance."""

    def __init__(self, index: int, pivot: float, label: str | None = None):
        self.index = index
        self.pivot = pivot
        what = label or f"coordinate {index}"
        super().__init__(
            f"matrix is singular or indefinite at {what} "
            f"(pivot {pivot:.3e} below tolerance {PIVOT_TOL:.0e})")


def chol_factor(a: np.ndarray, labels: list[str] | None = None) -> np.ndarray:
    """Lower-triangular Cholesky factor of a symmetric PSD matrix.

    Fails with :class:`SingularMatrixError` naming the offending coordinate
    when a pivot drops below ``PIVOT_TOL`` relative to the diagonal scale.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    scale = max(float(np.max(np.abs(np.diag(a)))), 1.0)
    low = np.zeros((n, n))
    for j in range(n):
        d = a[j, j] - np.dot(low[j, :j], low[j, :j])
        if d <= PIVOT_TOL * scale:
            raise SingularMatrixError(j, float(d), labels[j] if labels else None)
        low[j, j] = np.sqrt(d)
        for i in range(j + 1, n):
            low[i, j] = (a[i, j] - np.dot(low[i, :j], low[j, :j])) / low[j, j]
    return low


def chol_solve(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b given the Cholesky factor of A."""
    n = low.shape[0]
    y = np.zeros(n)
    for i in range(n):
        y[i] = (b[i] - np.dot(low[i, :i], y[:i])) / low[i, i]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - np.dot(low[i + 1:, i], x[i + 1:])) / low[i, i]
    return x


def chol_inverse(low: np.ndarray) -> np.ndarray:
    n = low.shape[0]
    inv = np.zeros((n, n))
    eye = np.eye(n)
    for k in range(n):
        inv[:, k] = chol_solve(low, eye[:, k])
    return 0.5 * (inv + inv.T)


def row_rank(mat: np.ndarray, tol: float = 1e-10) -> int:
    """Numerical row rank by modified Gram-Schmidt with a relative tolerance."""
    mat = np.asarray(mat, dtype=float)
    basis: list[np.ndarray] = []
    for row in mat:
        norm0 = np.linalg.norm(row)
        if norm0 == 0.0:
            continue
        v = row.copy()
        for b in basis:
            v -= np.dot(v, b) * b
        # second pass for numerical safety
        for b in basis:
            v -= np.dot(v, b) * b
        norm = np.linalg.norm(v)
        if norm > tol * norm0:
            basis.append(v / norm)
    return len(basis)
