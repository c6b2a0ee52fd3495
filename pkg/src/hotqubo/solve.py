"""Exhaustive, annealing and random-sampling solvers over QUBO instances."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from hotqubo.encode import decode
from hotqubo.qubo import QuboInstance, energy, energy_many

BRUTE_FORCE_MAX_BITS = 26


class TooLarge(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SolveResult:
    best_bits: np.ndarray
    best_energy: float
    best_units: np.ndarray
    evaluations: int
    wall_time: float
    solver: str
    seed: int | None = None

    @property
    def objective_value(self) -> float:
        return -self.best_energy


@dataclass(frozen=True)
class AnnealSchedule:
    sweeps: int = 2000
    beta_start: float = 0.1
    beta_end: float = 50.0
    restarts: int = 8
    seed: int = 0
    normalize: bool = True

    def __post_init__(self):
        if self.sweeps < 1 or self.restarts < 1:
            raise ValueError("sweeps and restarts must be at least 1")
        if not (0 < self.beta_start <= self.beta_end):
            raise ValueError("need 0 < beta_start <= beta_end")

    def betas(self, scale: float = 1.0) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([self.beta_end * scale])
        return scale * np.geomspace(self.beta_start, self.beta_end, self.sweeps)


def _result(qi, bits, evaluations, started, solver, seed):
    bits = np.asarray(bits, dtype=np.int8)
    return SolveResult(
        best_bits=bits,
        best_energy=energy(qi, bits),
        best_units=decode(qi.encoding, bits),
        evaluations=int(evaluations),
        wall_time=time.perf_counter() - started,
        solver=solver,
        seed=seed,
    )


def _lex_less(a, b) -> bool:
    """Lexicographic order on bit vectors (first position most significant)."""
    diff = np.nonzero(a != b)[0]
    return bool(diff.size) and a[diff[0]] < b[diff[0]]


@numba.njit(cache=True)
def _enumerate_min(q):
    n = q.shape[0]
    best = np.inf
    best_index = 0
    bits = np.zeros(n, dtype=np.int64)
    for index in range(1 << n):
        for j in range(n):
            bits[j] = (index >> (n - 1 - j)) & 1
        e = 0.0
        for i in range(n):
            if bits[i]:
                e += q[i, i]
                for j in range(i + 1, n):
                    if bits[j]:
                        e += q[i, j]
        if e < best:
            best = e
            best_index = index
    return best_index


def brute_force(qi: QuboInstance) -> SolveResult:
    """Exact minimum over all assignments; ties go to the lexicographically lowest."""
    started = time.perf_counter()
    n = qi.total_bits
    if n > BRUTE_FORCE_MAX_BITS:
        raise TooLarge(f"{n} bits exceeds the brute-force cap of {BRUTE_FORCE_MAX_BITS}")
    index = _enumerate_min(np.ascontiguousarray(qi.q)) if n else 0
    bits = np.array([(index >> (n - 1 - j)) & 1 for j in range(n)], dtype=np.int8)
    return _result(qi, bits, 1 << n, started, "bruteforce", None)


@numba.njit(cache=True, nogil=True)
def _anneal_run(diag, coupling, bits, betas, orders, uniforms):
    n = bits.shape[0]
    field = coupling @ bits.astype(np.float64)
    e = 0.0
    for i in range(n):
        if bits[i]:
            e += diag[i] + 0.5 * field[i]
    best_e = e
    best = bits.copy()
    for s in range(betas.shape[0]):
        beta = betas[s]
        for t in range(n):
            k = orders[s, t]
            sign = 1.0 - 2.0 * bits[k]
            delta = sign * (diag[k] + field[k])
            if delta <= 0.0 or uniforms[s, t] < np.exp(-beta * delta):
                bits[k] = 1 - bits[k]
                e += delta
                for j in range(n):
                    field[j] += sign * coupling[j, k]
                if e < best_e:
                    best_e = e
                    best[:] = bits
    return best, best_e


def flip_delta(qi: QuboInstance, bits, k: int) -> float:
    """Energy change from flipping bit ``k``, via local fields (O(total_bits))."""
    b = np.asarray(bits, dtype=np.float64)
    coupling = qi.symmetric_couplings()
    return (1.0 - 2.0 * b[k]) * (qi.q[k, k] + coupling[k] @ b)


def simulated_annealing(
    qi: QuboInstance,
    sched: AnnealSchedule | None = None,
    warm_start=None,
    workers: int = 1,
) -> SolveResult:
    """Metropolis single-flip annealing with a geometric inverse-temperature ramp.

    Each restart draws from its own generator seeded by ``(seed, restart)``,
    so results do not depend on ``workers``.
    """
    sched = sched or AnnealSchedule()
    started = time.perf_counter()
    n = qi.total_bits
    if n < 1:
        raise ValueError("annealing needs at least one bit")
    diag = np.ascontiguousarray(np.diag(qi.q))
    coupling = np.ascontiguousarray(qi.symmetric_couplings())
    scale = 1.0
    if sched.normalize:
        peak = float(np.max(np.abs(qi.q)))
        scale = 1.0 / peak if peak > 0 else 1.0
    betas = sched.betas(scale)
    if warm_start is not None:
        warm_start = np.asarray(warm_start, dtype=np.int64)
        if warm_start.shape != (n,):
            raise ValueError(f"warm start needs {n} bits")

    def run(restart):
        rng = np.random.default_rng([sched.seed, restart])
        if warm_start is None:
            init = rng.integers(0, 2, size=n, dtype=np.int64)
        else:
            init = warm_start.copy()
        orders = np.argsort(rng.random((sched.sweeps, n)), axis=1)
        uniforms = rng.random((sched.sweeps, n))
        best, best_e = _anneal_run(diag, coupling, init, betas, orders, uniforms)
        return best.astype(np.int8), best_e

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(run, range(sched.restarts)))
    else:
        runs = [run(r) for r in range(sched.restarts)]

    best_bits, best_e = runs[0]
    for bits, e in runs[1:]:
        if e < best_e or (e == best_e and _lex_less(bits, best_bits)):
            best_bits, best_e = bits, e
    evaluations = sched.restarts * sched.sweeps * n
    return _result(qi, best_bits, evaluations, started, "anneal", sched.seed)


def random_search(qi: QuboInstance, samples: int, seed: int = 0, batch: int = 65536) -> SolveResult:
    """Best of ``samples`` uniform random bit vectors."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    started = time.perf_counter()
    n = qi.total_bits
    if n == 0:
        return _result(qi, np.zeros(0, dtype=np.int8), samples, started, "random", seed)
    rng = np.random.default_rng(seed)
    best_bits, best_e = None, np.inf
    left = samples
    while left:
        size = min(batch, left)
        draws = rng.integers(0, 2, size=(size, n), dtype=np.int8)
        es = energy_many(qi, draws)
        e = float(es.min())
        tied = draws[es == e]
        cand = tied[np.lexsort(tied.T[::-1])[0]]
        if best_bits is None or e < best_e or (e == best_e and _lex_less(cand, best_bits)):
            best_bits, best_e = cand, e
        left -= size
    return _result(qi, best_bits, samples, started, "random", seed)
