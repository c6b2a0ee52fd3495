"""Concave quadratic objectives ``f(x) = a.x - 0.5 x'Bx + c`` (maximized)."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from hotqubo.numerics import DimensionMismatch, as_symmatrix, as_vector, cholesky


@dataclass(frozen=True, eq=False)
class QuadraticModel:
    linear: np.ndarray
    quadratic: np.ndarray
    constant: float = 0.0

    def __post_init__(self):
        a = as_vector(self.linear, "linear")
        b = as_symmatrix(self.quadratic, "quadratic")
        if b.shape[0] != a.shape[0]:
            raise DimensionMismatch(f"linear has dim {a.shape[0]}, quadratic has dim {b.shape[0]}")
        object.__setattr__(self, "linear", a)
        object.__setattr__(self, "quadratic", b)
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "factor", cholesky(b))

    @property
    def n(self) -> int:
        return self.linear.shape[0]

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.linear.tobytes())
        h.update(self.quadratic.tobytes())
        h.update(np.float64(self.constant).tobytes())
        return h.hexdigest()[:16]


def build_basic(mu_tilde_f, sigma_tilde, gamma_tilde) -> QuadraticModel:
    if not gamma_tilde > 0:
        raise ValueError("gamma_tilde must be positive")
    return QuadraticModel(mu_tilde_f, gamma_tilde * np.asarray(sigma_tilde, dtype=np.float64), 0.0)


def build_with_transaction_costs(mu_tilde_f, sigma_tilde, gamma_tilde, kappa_tilde, x0) -> QuadraticModel:
    """Fold ``- kappa (x - x0)' S (x - x0)`` into the canonical form."""
    if not gamma_tilde > 0:
        raise ValueError("gamma_tilde must be positive")
    if not kappa_tilde >= 0:
        raise ValueError("kappa_tilde must be non-negative")
    mu = as_vector(mu_tilde_f, "mu_tilde_f")
    s = as_symmatrix(sigma_tilde, "sigma_tilde")
    x0 = as_vector(x0, "x0")
    if not (s.shape[0] == mu.shape[0] == x0.shape[0]):
        raise DimensionMismatch("mu_tilde_f, sigma_tilde and x0 dimensions differ")
    s_x0 = s @ x0
    return QuadraticModel(
        mu + 2.0 * kappa_tilde * s_x0,
        (gamma_tilde + 2.0 * kappa_tilde) * s,
        -kappa_tilde * float(x0 @ s_x0),
    )


def evaluate(m: QuadraticModel, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (m.n,):
        raise DimensionMismatch(f"point has shape {x.shape}, model has dim {m.n}")
    return float(m.linear @ x - 0.5 * (x @ m.quadratic @ x) + m.constant)


def evaluate_many(m: QuadraticModel, xs) -> np.ndarray:
    """Row-wise objective for a (k, n) stack of points."""
    xs = np.asarray(xs, dtype=np.float64)
    return xs @ m.linear - 0.5 * np.einsum("ij,jk,ik->i", xs, m.quadratic, xs) + m.constant
