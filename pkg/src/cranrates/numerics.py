"""Dense linear-algebra kernels: Cholesky, symmetric 2x2 eig, clamped log2.

Everything operates on plain float64 numpy arrays. All matrices factored
here are structurally "identity plus positive semidefinite", so the
routines do no pivoting and no regularization: a failed factorization
means the caller assembled the wrong matrix and must surface as an error.
Outputs are deterministic down to eigenvector orientation so that sweep
results are bit-reproducible for a given seed.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "DomainError",
    "NotPositiveDefinite",
    "cholesky_lower",
    "log2_plus",
    "sym_eig2",
]

_SYMMETRY_RTOL = 1e-12


class DomainError(ValueError):
    """Argument lies outside the mathematical domain of the operation."""


class NotPositiveDefinite(ArithmeticError):
    """A Cholesky pivot came out zero or negative."""


def _as_symmetric(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m)):
        raise DomainError("matrix entries must be finite")
    if m.size:
        scale = max(1.0, float(np.max(np.abs(m))))
        if float(np.max(np.abs(m - m.T))) > _SYMMETRY_RTOL * scale:
            raise DomainError("matrix is not symmetric")
    return m


def cholesky_lower(m) -> np.ndarray:
    """Lower-triangular G with G @ G.T == m for symmetric positive-definite m.

    Raises NotPositiveDefinite as soon as a pivot drops to zero or below;
    the input is never perturbed to force a factorization through.
    """
    m = _as_symmetric(m)
    n = m.shape[0]
    g = np.zeros((n, n))
    for j in range(n):
        pivot = m[j, j] - g[j, :j] @ g[j, :j]
        if pivot <= 0.0:
            raise NotPositiveDefinite(f"pivot {pivot:.6e} at column {j}")
        g[j, j] = math.sqrt(pivot)
        if j + 1 < n:
            g[j + 1:, j] = (m[j + 1:, j] - g[j + 1:, :j] @ g[j, :j]) / g[j, j]
    return g


def sym_eig2(m) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigendecomposition of a symmetric 2x2 matrix.

    Returns (u, lam) with lam descending and the columns of u the matching
    unit eigenvectors, so u @ diag(lam) @ u.T == m. Orientation is fixed:
    the largest-magnitude entry of each eigenvector is positive, and a
    repeated eigenvalue returns u = I.
    """
    m = _as_symmetric(m)
    if m.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {m.shape}")
    a, b, c = m[0, 0], m[0, 1], m[1, 1]
    mean = 0.5 * (a + c)
    gap = 0.5 * (a - c)
    radius = math.hypot(gap, b)
    lam = np.array([mean + radius, mean - radius])
    if radius == 0.0:
        return np.eye(2), lam
    if b == 0.0:
        if a >= c:
            return np.eye(2), lam
        return np.array([[0.0, 1.0], [1.0, 0.0]]), lam
    # of the two classical eigenvector formulas, pick the one whose leading
    # entry is >= radius, which cannot cancel
    if gap >= 0.0:
        v = np.array([gap + radius, b])
    else:
        v = np.array([b, radius - gap])
    v /= math.hypot(v[0], v[1])
    u = np.column_stack([v, [-v[1], v[0]]])
    for col in range(2):
        lead = int(np.argmax(np.abs(u[:, col])))
        if u[lead, col] < 0.0:
            u[:, col] = -u[:, col]
    return u, lam


def log2_plus(x: float) -> float:
    """max(0, log2(x)) for x >= 0."""
    x = float(x)
    if math.isnan(x) or x < 0.0:
        raise DomainError(f"log2_plus needs x >= 0, got {x}")
    if x <= 1.0:
        return 0.0
    return math.log2(x)
