"""Small dense linear algebra kernel.

Symmetric matrices are plain ``float64`` numpy arrays; only the lower
triangle is read by :func:`cholesky`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PIVOT_RTOL = 1e-12


class NotPositiveDefinite(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


def as_vector(x, name="vector") -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"{name} must be one-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


def as_symmatrix(m, name="matrix") -> np.ndarray:
    """Return a symmetric float64 copy of ``m`` built from its lower triangle."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    low = np.tril(a)
    return low + np.tril(a, -1).T


@dataclass(frozen=True)
class CholeskyFactor:
    lower: np.ndarray

    @property
    def source_dim(self) -> int:
        return self.lower.shape[0]


def cholesky(m) -> CholeskyFactor:
    """Factor ``m = L L^T`` with the column (left-looking) algorithm.

    Raises NotPositiveDefinite when a pivot falls to or below
    ``1e-12 * max(diag(m))``.
    """
    a = as_symmatrix(m)
    n = a.shape[0]
    lower = np.zeros_like(a)
    if n == 0:
        return CholeskyFactor(lower)
    tol = PIVOT_RTOL * max(float(np.max(np.diag(a))), 0.0)
    for j in range(n):
        row = lower[j, :j]
        pivot = a[j, j] - row @ row
        if not pivot > tol:
            raise NotPositiveDefinite(f"pivot {j} is {pivot:.3e} (tolerance {tol:.3e})")
        d = math.sqrt(pivot)
        lower[j, j] = d
        if j + 1 < n:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ row) / d
    return CholeskyFactor(lower)


def is_positive_definite(m) -> bool:
    try:
        cholesky(m)
    except NotPositiveDefinite:
        return False
    return True


def _forward(lower, b):
    n = lower.shape[0]
    y = np.empty(n)
    for i in range(n):
        y[i] = (b[i] - lower[i, :i] @ y[:i]) / lower[i, i]
    return y


def _backward(lower, y):
    n = lower.shape[0]
    x = np.empty(n)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - lower[i + 1 :, i] @ x[i + 1 :]) / lower[i, i]
    return x


def solve(f: CholeskyFactor, rhs) -> np.ndarray:
    """Solve ``(L L^T) y = rhs`` by forward then back substitution."""
    b = as_vector(rhs, "rhs")
    if b.shape[0] != f.source_dim:
        raise DimensionMismatch(f"factor has dim {f.source_dim}, rhs has dim {b.shape[0]}")
    return _backward(f.lower, _forward(f.lower, b))


def inverse_diagonal(f: CholeskyFactor) -> np.ndarray:
    """diag(M^-1), one solve against each unit vector."""
    n = f.source_dim
    out = np.empty(n)
    e = np.zeros(n)
    for i in range(n):
        e[i] = 1.0
        out[i] = solve(f, e)[i]
        e[i] = 0.0
    return out


def quad_form(m, x) -> float:
    a = np.asarray(m, dtype=np.float64)
    v = as_vector(x)
    if a.ndim != 2 or a.shape != (v.shape[0], v.shape[0]):
        raise DimensionMismatch(f"matrix shape {a.shape} vs vector length {v.shape[0]}")
    total = 0.0
    for i in range(v.shape[0]):
        total += v[i] * float(a[i] @ v)
    return total
