"""Return/price ingestion, moment estimation and unit-space calibration."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from hotqubo.numerics import DimensionMismatch, as_symmatrix, is_positive_definite

SHRINK_LADDER = (0.0, 1e-6, 1e-4, 1e-2, 0.1)
FALLBACK_EPS = 1e-8


class MarketDataError(ValueError):
    pass


class TickerMismatch(MarketDataError):
    pass


class NonPositivePrice(MarketDataError):
    pass


class TooFewPeriods(MarketDataError):
    pass


class MalformedCell(MarketDataError):
    pass


class RegularizationFailed(MarketDataError):
    pass


@dataclass(frozen=True)
class AssetUniverse:
    tickers: list[str]
    prices: np.ndarray
    returns: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    shrinkage: float = 0.0

    @property
    def n(self) -> int:
        return len(self.tickers)

    def head(self, k: int) -> "AssetUniverse":
        """Universe restricted to the first ``k`` tickers, re-estimated."""
        if not 1 <= k <= self.n:
            raise ValueError(f"cannot take {k} of {self.n} assets")
        return from_arrays(self.tickers[:k], self.prices[:k], self.returns[:, :k])


@dataclass(frozen=True)
class Calibration:
    budget: float = 250_000.0
    risk_free: float = 0.0
    gamma: float = 3.0
    kappa_scale: float = 50.0

    def __post_init__(self):
        if not self.budget > 0:
            raise ValueError("budget must be positive")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.kappa_scale >= 0:
            raise ValueError("kappa_scale must be non-negative")


def regularize(sigma_raw, with_delta: bool = False):
    """Shrink toward ``avgvar * I`` with the smallest ladder step that is PD.

    Falls back to ``1e-8 * I`` when the diagonal is all zero.
    """
    s = as_symmatrix(sigma_raw, "sigma")
    n = s.shape[0]
    avgvar = float(np.mean(np.diag(s))) if n else 0.0
    if avgvar > 0:
        target = avgvar * np.eye(n)
        for delta in SHRINK_LADDER:
            shrunk = s if delta == 0.0 else (1.0 - delta) * s + delta * target
            if is_positive_definite(shrunk):
                return (shrunk, delta) if with_delta else shrunk
    if not np.any(np.diag(s) != 0.0):
        fallback = FALLBACK_EPS * np.eye(n)
        return (fallback, math.nan) if with_delta else fallback
    raise RegularizationFailed("covariance is not PD even at shrinkage 0.1")


def from_arrays(tickers, prices, returns) -> AssetUniverse:
    tickers = list(tickers)
    prices = np.asarray(prices, dtype=np.float64)
    returns = np.asarray(returns, dtype=np.float64)
    if returns.ndim != 2 or returns.shape[1] != len(tickers) or prices.shape != (len(tickers),):
        raise DimensionMismatch("returns/prices do not match the ticker list")
    if np.any(~(prices > 0)):
        bad = [t for t, p in zip(tickers, prices) if not p > 0]
        raise NonPositivePrice(f"non-positive price for {', '.join(bad)}")
    if returns.shape[0] < 2:
        raise TooFewPeriods(f"need at least 2 return periods, got {returns.shape[0]}")
    mu = returns.mean(axis=0)
    raw = np.atleast_2d(np.cov(returns, rowvar=False, ddof=1))
    # constant columns have exactly zero (co)variance; drop rounding residue from the mean
    flat = np.ptp(returns, axis=0) == 0
    raw[flat, :] = 0.0
    raw[:, flat] = 0.0
    sigma, delta = regularize(raw, with_delta=True)
    return AssetUniverse(tickers, prices, returns, mu, sigma, delta)


def _float_cell(text, where):
    try:
        value = float(text)
    except ValueError:
        raise MalformedCell(f"{where}: cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise MalformedCell(f"{where}: non-finite value {text!r}")
    return value


def read_returns_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 2:
        raise MalformedCell(f"{path}: missing header `period,<ticker>,...`")
    tickers = [t.strip() for t in rows[0][1:]]
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(tickers) + 1:
            raise MalformedCell(f"{path}:{lineno}: expected {len(tickers) + 1} cells, got {len(row)}")
        data.append([_float_cell(c, f"{path}:{lineno}") for c in row[1:]])
    return tickers, np.array(data, dtype=np.float64).reshape(len(data), len(tickers))


def read_prices_csv(path):
    prices = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["ticker", "price"]:
            raise MalformedCell(f"{path}: missing header `ticker,price`")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise MalformedCell(f"{path}:{lineno}: expected 2 cells, got {len(row)}")
            prices[row[0].strip()] = _float_cell(row[1], f"{path}:{lineno}")
    return prices


def load_universe(returns_source, prices_source) -> AssetUniverse:
    """Read the wide returns CSV and the ticker/price CSV into a universe."""
    tickers, returns = read_returns_csv(returns_source)
    prices = read_prices_csv(prices_source)
    missing = [t for t in tickers if t not in prices]
    extra = sorted(set(prices) - set(tickers))
    if missing or extra:
        raise TickerMismatch(
            f"tickers differ between returns and prices: missing prices for {missing}, "
            f"unknown tickers {extra}"
        )
    return from_arrays(tickers, [prices[t] for t in tickers], returns)


def scale_to_units(u: AssetUniverse, cal: Calibration):
    """Price-scaled parameters for the integer problem in share units.

    Returns ``(mu_tilde_f, sigma_tilde, gamma_tilde, kappa_tilde)``.
    """
    p = u.prices
    sigma_tilde = p[:, None] * u.sigma * p[None, :]
    mu_tilde_f = (u.mu - cal.risk_free) * p
    gamma_tilde = cal.gamma / cal.budget
    kappa_tilde = cal.kappa_scale * cal.gamma / cal.budget
    return mu_tilde_f, sigma_tilde, gamma_tilde, kappa_tilde


def initial_portfolio(u: AssetUniverse, cal: Calibration) -> np.ndarray:
    """Equal-budget split floored to whole shares."""
    return np.floor((cal.budget / u.n) / u.prices).astype(np.int64)


def weights_from_units(x, u: AssetUniverse, cal: Calibration):
    """Return ``(w, risk_free_weight)`` with ``w = x * p / B``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != u.prices.shape:
        raise DimensionMismatch(f"{x.shape[0]} units for {u.n} assets")
    w = x * u.prices / cal.budget
    return w, 1.0 - float(w.sum())


def write_returns_csv(path, tickers, returns, labels=None):
    path = Path(path)
    labels = labels if labels is not None else [f"t{i:04d}" for i in range(len(returns))]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["period", *tickers])
        for label, row in zip(labels, returns):
            w.writerow([label, *(repr(float(v)) for v in row)])


def write_prices_csv(path, tickers, prices):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ticker", "price"])
        for t, p in zip(tickers, prices):
            w.writerow([t, repr(float(p))])
