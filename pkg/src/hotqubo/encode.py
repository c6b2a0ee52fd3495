"""Bit encodings of per-asset integer intervals.

Asset ``i`` decodes as ``offset[i] + sum_j weights[i][j] * bit[i, j]``.
The bounded scheme uses weights ``1, 2, ..., 2**(k-2), R - 2**(k-1) + 1``
for a span ``R`` and ``k = ceil(log2(R + 1))`` bits, so every bit vector
decodes inside ``[L, L + R]`` and every integer there is reachable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hotqubo.hotstart import HotStartBox, qubits_for


class LengthMismatch(ValueError):
    pass


class OutOfRange(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Encoding:
    offsets: np.ndarray
    weights: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        offsets = np.asarray(self.offsets, dtype=np.int64).reshape(-1)
        weights = tuple(tuple(int(w) for w in ws) for ws in self.weights)
        if len(weights) != offsets.shape[0]:
            raise LengthMismatch(f"{offsets.shape[0]} offsets but {len(weights)} weight lists")
        if any(w <= 0 for ws in weights for w in ws):
            raise ValueError("bit weights must be positive integers")
        names = tuple(self.names) or tuple(f"x{i}" for i in range(len(weights)))
        if len(names) != len(weights):
            raise LengthMismatch("one name per asset required")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def spans(self) -> np.ndarray:
        return np.array([sum(ws) for ws in self.weights], dtype=np.int64)

    @property
    def upper(self) -> np.ndarray:
        return self.offsets + self.spans

    @property
    def total_bits(self) -> int:
        return sum(len(ws) for ws in self.weights)

    @property
    def bit_index(self) -> list[list[int]]:
        """Global bit position of every (asset, local bit) pair."""
        out, pos = [], 0
        for ws in self.weights:
            out.append(list(range(pos, pos + len(ws))))
            pos += len(ws)
        return out

    def weight_matrix(self) -> np.ndarray:
        """(n, total_bits) matrix ``W`` with ``x = offsets + W @ bits``."""
        w = np.zeros((self.n, self.total_bits))
        for i, idx in enumerate(self.bit_index):
            w[i, idx] = self.weights[i]
        return w

    def same_as(self, other: "Encoding") -> bool:
        return (
            np.array_equal(self.offsets, other.offsets)
            and self.weights == other.weights
            and self.names == other.names
        )


def bounded_weights(span: int) -> tuple[int, ...]:
    if span < 0:
        raise ValueError("span must be non-negative")
    k = qubits_for(span + 1)
    if k == 0:
        return ()
    return tuple(1 << j for j in range(k - 1)) + (span - (1 << (k - 1)) + 1,)


def bounded_encoding(box: HotStartBox, names=()) -> Encoding:
    spans = box.upper - box.lower
    return Encoding(box.lower.copy(), tuple(bounded_weights(int(r)) for r in spans), tuple(names))


def baseline_encoding(n: int, k: int, names=()) -> Encoding:
    """Plain k-bit unsigned binary per asset, range 0..2**k - 1."""
    if k < 1:
        raise ValueError("k must be at least 1")
    ws = tuple(1 << j for j in range(k))
    return Encoding(np.zeros(n, dtype=np.int64), (ws,) * n, tuple(names))


def decode(e: Encoding, bits) -> np.ndarray:
    b = np.asarray(bits, dtype=np.int64)
    if b.shape != (e.total_bits,):
        raise LengthMismatch(f"expected {e.total_bits} bits, got shape {b.shape}")
    out = e.offsets.copy()
    for i, idx in enumerate(e.bit_index):
        out[i] += int(np.dot(e.weights[i], b[idx])) if idx else 0
    return out


def decode_many(e: Encoding, bits) -> np.ndarray:
    b = np.asarray(bits, dtype=np.int64)
    return e.offsets[None, :] + b @ e.weight_matrix().astype(np.int64).T


def encode_value(e: Encoding, x) -> np.ndarray:
    """Bits decoding to ``x``: greedy, largest weight first (ties by position)."""
    x = np.asarray(x, dtype=np.int64)
    if x.shape != (e.n,):
        raise LengthMismatch(f"expected {e.n} values, got shape {x.shape}")
    bits = np.zeros(e.total_bits, dtype=np.int8)
    for i, idx in enumerate(e.bit_index):
        rest = int(x[i] - e.offsets[i])
        if rest < 0 or rest > sum(e.weights[i]):
            raise OutOfRange(f"{e.names[i]}={int(x[i])} outside [{e.offsets[i]}, {e.upper[i]}]")
        order = sorted(range(len(idx)), key=lambda j: (-e.weights[i][j], j))
        for j in order:
            if e.weights[i][j] <= rest:
                bits[idx[j]] = 1
                rest -= e.weights[i][j]
        if rest:
            raise OutOfRange(f"{e.names[i]}={int(x[i])} not representable by greedy fill")
    return bits
