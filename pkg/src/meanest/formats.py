"""Reading and writing point sets.

Text: a header line ``n d`` followed by ``n`` rows of ``d`` whitespace-separated
floats. Binary: the magic ``MEANEST1``, then ``n`` and ``d`` as little-endian
uint64, then ``n*d`` little-endian float64 values in row-major order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import DomainError, PointSet

MAGIC = b"MEANEST1"
_HEADER = struct.Struct("<QQ")


def to_bytes(A: PointSet) -> bytes:
    return MAGIC + _HEADER.pack(A.n, A.d) + A.points.astype("<f8").tobytes(order="C")


def from_bytes(buf: bytes) -> PointSet:
    if buf[: len(MAGIC)] != MAGIC:
        raise DomainError("missing MEANEST1 magic")
    off = len(MAGIC)
    if len(buf) < off + _HEADER.size:
        raise DomainError("truncated header")
    n, d = _HEADER.unpack_from(buf, off)
    off += _HEADER.size
    expected = off + 8 * n * d
    if len(buf) != expected:
        raise DomainError(f"expected {expected} bytes for n={n}, d={d}, got {len(buf)}")
    X = np.frombuffer(buf, dtype="<f8", count=n * d, offset=off).reshape(n, d)
    return PointSet(X.astype(np.float64))


def to_text(A: PointSet) -> str:
    lines = [f"{A.n} {A.d}"]
    lines.extend(" ".join(repr(float(v)) for v in row) for row in A.points)
    return "\n".join(lines) + "\n"


def from_text(text: str) -> PointSet:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DomainError("empty point set file")
    try:
        n, d = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise DomainError(f"bad header line {lines[0]!r}; expected 'n d'") from exc
    if len(lines) - 1 != n:
        raise DomainError(f"header declares {n} points, found {len(lines) - 1} rows")
    rows = [ln.split() for ln in lines[1:]]
    for i, row in enumerate(rows):
        if len(row) != d:
            raise DomainError(f"row {i} has {len(row)} values, expected {d}")
    return PointSet(np.array(rows, dtype=np.float64).reshape(n, d))


def read_pointset(path) -> PointSet:
    """Load a point set, detecting the binary format by its magic bytes."""
    raw = Path(path).read_bytes()
    if raw.startswith(MAGIC):
        return from_bytes(raw)
    return from_text(raw.decode("ascii"))


def write_pointset(A: PointSet, path, binary: bool | None = None) -> None:
    """Write ``A``; ``binary=None`` picks binary for a ``.bin`` suffix."""
    path = Path(path)
    if binary is None:
        binary = path.suffix == ".bin"
    if binary:
        path.write_bytes(to_bytes(A))
    else:
        path.write_text(to_text(A))
