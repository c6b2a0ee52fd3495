"""Seeded synthetic market data (three-factor returns, log-uniform prices)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from hotqubo.market import write_prices_csv, write_returns_csv

N_FACTORS = 3


def generate(seed: int, n: int, periods: int):
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    tickers = [f"A{i:03d}" for i in range(n)]
    prices = np.round(np.exp(rng.uniform(np.log(5.0), np.log(2000.0), size=n)), 2)
    loadings = np.column_stack([
        rng.normal(1.0, 0.3, size=n),
        rng.normal(0.0, 0.5, size=(n, N_FACTORS - 1)),
    ])
    factor_vol = np.array([0.04, 0.02, 0.015])
    idio_vol = rng.uniform(0.04, 0.10, size=n)
    drift = rng.uniform(0.004, 0.015, size=n)
    factors = rng.normal(size=(periods, N_FACTORS)) * factor_vol
    noise = rng.normal(size=(periods, n)) * idio_vol
    returns = drift + factors @ loadings.T + noise
    return tickers, prices, returns


def write_dataset(out_dir, seed: int, n: int, periods: int):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tickers, prices, returns = generate(seed, n, periods)
    write_returns_csv(out / "returns.csv", tickers, returns)
    write_prices_csv(out / "prices.csv", tickers, prices)
    return out / "returns.csv", out / "prices.csv"
