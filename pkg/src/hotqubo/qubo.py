"""QUBO assembly from a quadratic model plus an integer encoding, and a text format.

``Q`` is upper triangular; ``Q[i, j]`` for ``i < j`` is the full coefficient
of ``b_i b_j``. Energies are ``b'Qb + offset = -f(decode(b))``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from hotqubo.encode import Encoding, LengthMismatch
from hotqubo.model import QuadraticModel, evaluate
from hotqubo.numerics import DimensionMismatch

FORMAT_TAG = "HOTQUBO"
FORMAT_VERSION = "v1"


class ParseError(ValueError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class VersionMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class QuboInstance:
    q: np.ndarray
    offset: float
    encoding: Encoding
    meta: dict = field(default_factory=dict)

    @property
    def total_bits(self) -> int:
        return self.q.shape[0]

    def symmetric_couplings(self) -> np.ndarray:
        """``J`` with zero diagonal and ``J[i, j] = J[j, i]`` = coefficient of b_i b_j."""
        off = np.triu(self.q, 1)
        return off + off.T


def build_qubo(m: QuadraticModel, e: Encoding, mode: str = "hotstart") -> QuboInstance:
    """Substitute ``x = L + W b`` into ``-f(x)`` and collect terms."""
    if e.n != m.n:
        raise DimensionMismatch(f"encoding has {e.n} assets, model has {m.n}")
    w = e.weight_matrix()
    low = e.offsets.astype(np.float64)
    pair = 0.5 * (w.T @ m.quadratic @ w)
    lin = w.T @ (m.quadratic @ low - m.linear)
    q = 2.0 * np.triu(pair, 1)
    q[np.diag_indices_from(q)] = np.diag(pair) + lin
    meta = {"mode": mode, "model": m.digest()}
    return QuboInstance(q, -evaluate(m, low), e, meta)


def energy(qi: QuboInstance, bits) -> float:
    b = np.asarray(bits, dtype=np.float64)
    if b.shape != (qi.total_bits,):
        raise LengthMismatch(f"expected {qi.total_bits} bits, got shape {b.shape}")
    return float(b @ qi.q @ b) + qi.offset


def energy_many(qi: QuboInstance, bits) -> np.ndarray:
    b = np.asarray(bits, dtype=np.float64)
    return np.einsum("ij,jk,ik->i", b, qi.q, b) + qi.offset


def _num(v: float) -> str:
    return format(float(v), ".17g")


def export(qi: QuboInstance, sink) -> None:
    """Write the ``HOTQUBO v1`` text format to a text stream or path."""
    if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            export(qi, fh)
        return
    e = qi.encoding
    sink.write(f"{FORMAT_TAG} {FORMAT_VERSION}\n")
    sink.write(f"bits {qi.total_bits} offset {_num(qi.offset)}\n")
    for name, off, ws in zip(e.names, e.offsets, e.weights):
        sink.write(f"var {name} offset {int(off)} weights {','.join(str(w) for w in ws)}\n")
    rows, cols = np.nonzero(np.triu(qi.q))
    for i, j in zip(rows, cols):
        sink.write(f"{i} {j} {_num(qi.q[i, j])}\n")


def dumps(qi: QuboInstance) -> str:
    buf = io.StringIO()
    export(qi, buf)
    return buf.getvalue()


def import_qubo(source) -> QuboInstance:
    """Parse the text format; inverse of :func:`export`."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        if isinstance(source, str) and source.startswith(FORMAT_TAG):
            return import_qubo(io.StringIO(source))
        with open(source, encoding="utf-8") as fh:
            return import_qubo(fh)
    lines = source.read().splitlines()
    if not lines:
        raise ParseError(1, "empty input")
    head = lines[0].split()
    if len(head) != 2 or head[0] != FORMAT_TAG:
        raise ParseError(1, f"expected '{FORMAT_TAG} {FORMAT_VERSION}'")
    if head[1] != FORMAT_VERSION:
        raise VersionMismatch(f"unsupported format version {head[1]!r}")
    if len(lines) < 2:
        raise ParseError(2, "missing 'bits' line")
    parts = lines[1].split()
    if len(parts) != 4 or parts[0] != "bits" or parts[2] != "offset":
        raise ParseError(2, "expected 'bits <n> offset <value>'")
    try:
        nbits = int(parts[1])
        offset = float(parts[3])
    except ValueError:
        raise ParseError(2, "bad bit count or offset") from None

    names, offsets, weights = [], [], []
    lineno = 3
    while lineno <= len(lines) and lines[lineno - 1].startswith("var "):
        p = lines[lineno - 1].split()
        if len(p) not in (5, 6) or p[2] != "offset" or p[4] != "weights":
            raise ParseError(lineno, "expected 'var <name> offset <L> weights <w1,...>'")
        try:
            offsets.append(int(p[3]))
            weights.append(tuple(int(w) for w in p[5].split(",")) if len(p) == 6 else ())
        except ValueError:
            raise ParseError(lineno, "bad offset or weights") from None
        names.append(p[1])
        lineno += 1
    enc = Encoding(np.array(offsets, dtype=np.int64), tuple(weights), tuple(names))
    if enc.total_bits != nbits:
        raise ParseError(2, f"header declares {nbits} bits, variables use {enc.total_bits}")

    q = np.zeros((nbits, nbits))
    last = (-1, -1)
    for k in range(lineno - 1, len(lines)):
        text = lines[k]
        if not text.strip():
            continue
        p = text.split()
        if len(p) != 3:
            raise ParseError(k + 1, "expected '<i> <j> <value>'")
        try:
            i, j, v = int(p[0]), int(p[1]), float(p[2])
        except ValueError:
            raise ParseError(k + 1, "bad entry") from None
        if not (0 <= i <= j < nbits):
            raise ParseError(k + 1, f"index ({i}, {j}) outside upper triangle of {nbits} bits")
        if (i, j) <= last:
            raise ParseError(k + 1, "entries must be sorted by (i, j) without repeats")
        q[i, j] = v
        last = (i, j)
    return QuboInstance(q, offset, enc, {"mode": "imported"})
