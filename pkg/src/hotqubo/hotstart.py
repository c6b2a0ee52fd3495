"""Continuous optimum, rounding gap and the integer box around the ellipsoid.

Every integer point outside ``{x : (x - x*)' M (x - x*) <= 1}`` with
``M = B / (2C)`` scores strictly below the rounded continuous optimum, so the
integer optimum lies in the ellipsoid and hence in its per-axis bounding box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hotqubo.model import QuadraticModel, evaluate
from hotqubo.numerics import cholesky, inverse_diagonal, solve

GAP_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class HotStartBox:
    x_star_cont: np.ndarray
    f_star: float
    rounded: np.ndarray
    gap_c: float
    ellipsoid_matrix: np.ndarray | None
    halfwidth: np.ndarray | None
    lower: np.ndarray
    upper: np.ndarray

    @property
    def integral_shortcut(self) -> bool:
        return self.gap_c == 0.0

    @property
    def counts(self) -> np.ndarray:
        return self.upper - self.lower + 1

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all(self.lower <= x) and np.all(x <= self.upper))

    def in_ellipsoid(self, x) -> bool:
        if self.ellipsoid_matrix is None:
            return bool(np.array_equal(np.asarray(x), self.rounded))
        d = np.asarray(x, dtype=np.float64) - self.x_star_cont
        return float(d @ self.ellipsoid_matrix @ d) <= 1.0


def continuous_optimum(m: QuadraticModel):
    """Stationary point ``B x = a`` and its objective value."""
    x = solve(m.factor, m.linear)
    return x, evaluate(m, x)


def round_nearest(x) -> np.ndarray:
    """Nearest integer, halves away from zero."""
    x = np.asarray(x, dtype=np.float64)
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


def _variable_part(m: QuadraticModel, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(m.linear @ x - 0.5 * (x @ m.quadratic @ x))


def gap_constant(m: QuadraticModel, x_star, f_star: float) -> float:
    """Objective lost by rounding, ``f* - f(round(x*))``, clamped to 0 when negligible.

    The additive constant is taken out of both terms before subtracting so the
    result does not depend on it.
    """
    x_star = np.asarray(x_star, dtype=np.float64)
    top = _variable_part(m, x_star)
    c = top - _variable_part(m, round_nearest(x_star))
    if c < GAP_RTOL * (1.0 + abs(top)):
        return 0.0
    return c


def compute_box(m: QuadraticModel) -> HotStartBox:
    x_star, f_star = continuous_optimum(m)
    rounded = round_nearest(x_star)
    c = gap_constant(m, x_star, f_star)
    if c == 0.0:
        return HotStartBox(x_star, f_star, rounded, 0.0, None, None, rounded.copy(), rounded.copy())
    ell = m.quadratic / (2.0 * c)
    half = np.sqrt(inverse_diagonal(cholesky(ell)))
    lower = np.ceil(x_star - half).astype(np.int64)
    upper = np.floor(x_star + half).astype(np.int64)
    lower = np.minimum(lower, rounded)
    upper = np.maximum(upper, rounded)
    return HotStartBox(x_star, f_star, rounded, c, ell, half, lower, upper)


def qubits_for(count: int) -> int:
    """Bits needed to address ``count`` integers, ceil(log2(count))."""
    if count < 1:
        raise ValueError("an interval holds at least one integer")
    return (int(count) - 1).bit_length()


def qubit_counts(box: HotStartBox):
    per_asset = [qubits_for(int(c)) for c in box.counts]
    return per_asset, sum(per_asset)


def theorem1_certificate(m: QuadraticModel, box: HotStartBox, probe) -> bool:
    """Falsification check of the ellipsoid claim at one integer point."""
    probe = np.asarray(probe, dtype=np.float64)
    f_probe = evaluate(m, probe)
    f_round = evaluate(m, box.rounded)
    if box.ellipsoid_matrix is None:
        return f_probe <= f_round + 1e-9 * (1.0 + abs(f_round))
    d = probe - box.x_star_cont
    r = float(d @ box.ellipsoid_matrix @ d)
    tol = 1e-9 * (1.0 + abs(f_round))
    if r <= 1.0:
        return f_probe >= f_round - tol
    return f_probe <= f_round + tol
