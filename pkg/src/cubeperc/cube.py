"""Combinatorial substrate for the binary hypercube Q^d.

Vertices are machine integers whose bit ``i`` is coordinate ``i``. Edges are
numbered ``e = i * 2**(d-1) + r`` where ``i`` is the direction and ``r`` is
the lower endpoint with bit ``i`` deleted. That layout is normative: golden
files and seeded runs depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numba
import numpy as np

from .errors import ValidationError

MAX_DIM = 30


@dataclass(frozen=True)
class CubeSpec:
    d: int
    n: int = field(init=False)
    m: int = field(init=False)

    def __post_init__(self) -> None:
        if isinstance(self.d, bool) or not isinstance(self.d, (int, np.integer)):
            raise ValidationError(f"dimension must be an integer, got {self.d!r}")
        if not 1 <= self.d <= MAX_DIM:
            raise ValidationError(f"dimension must lie in [1, {MAX_DIM}], got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "n", 1 << self.d)
        object.__setattr__(self, "m", self.d << (self.d - 1))

    @property
    def half(self) -> int:
        """Number of edges per direction, 2**(d-1)."""
        return self.n >> 1


def make_cube(d: int) -> CubeSpec:
    return CubeSpec(d)


def _check_vertex(v: int, spec: CubeSpec) -> None:
    if not 0 <= v < spec.n:
        raise ValidationError(f"vertex {v} outside [0, {spec.n})")


def _check_direction(i: int, spec: CubeSpec) -> None:
    if not 0 <= i < spec.d:
        raise ValidationError(f"direction {i} outside [0, {spec.d})")


def neighbor(v: int, i: int, spec: CubeSpec) -> int:
    _check_vertex(v, spec)
    _check_direction(i, spec)
    return v ^ (1 << i)


def hamming_distance(u: int, v: int) -> int:
    return (u ^ v).bit_count()


def encode_edge(u: int, i: int, spec: CubeSpec) -> int:
    """Edge id of ``{u, u | 1<<i}``; ``u`` must be the lower endpoint."""
    _check_vertex(u, spec)
    _check_direction(i, spec)
    if (u >> i) & 1:
        raise ValidationError(f"bit {i} of {u} is set; pass the lower endpoint")
    r = (u & ((1 << i) - 1)) | ((u >> (i + 1)) << i)
    return i * spec.half + r


def decode_edge(e: int, spec: CubeSpec) -> tuple[int, int]:
    """Inverse of :func:`encode_edge`: returns ``(lower endpoint, direction)``."""
    if not 0 <= e < spec.m:
        raise ValidationError(f"edge id {e} outside [0, {spec.m})")
    i, r = divmod(e, spec.half)
    u = (r & ((1 << i) - 1)) | ((r >> i) << (i + 1))
    return u, i


def edge_endpoints(e: int, spec: CubeSpec) -> tuple[int, int]:
    u, i = decode_edge(e, spec)
    return u, u | (1 << i)


def edge_endpoint_arrays(spec: CubeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper endpoints of every edge, indexed by edge id."""
    e = np.arange(spec.m, dtype=np.int64)
    i = e // spec.half
    r = e % spec.half
    low_bits = r & ((np.int64(1) << i) - 1)
    u = low_bits | ((r >> i) << (i + 1))
    return u, u | (np.int64(1) << i)


# Kernel-side codec; kept in lock-step with encode_edge / decode_edge.
@numba.njit(cache=True, nogil=True)
def edge_id(u, i, half):
    r = (u & ((1 << i) - 1)) | ((u >> (i + 1)) << i)
    return i * half + r


@numba.njit(cache=True, nogil=True)
def edge_lower(e, half):
    i = e // half
    r = e - i * half
    return (r & ((1 << i) - 1)) | ((r >> i) << (i + 1)), i


def boundary_size(S: Iterable[int], spec: CubeSpec) -> int:
    """Exact e(S, S^C): edges of Q^d with exactly one endpoint in ``S``."""
    members = set(S)
    for v in members:
        _check_vertex(v, spec)
    return sum(1 for v in members for i in range(spec.d) if v ^ (1 << i) not in members)


# Vertex sets as n-bit masks (bit v set iff v in S). Only meant for small d.


def _direction_masks(d: int) -> list[int]:
    n = 1 << d
    return [sum(1 << v for v in range(n) if not (v >> i) & 1) for i in range(d)]


def _popcount(x):
    if isinstance(x, np.ndarray):
        return np.bitwise_count(x).astype(np.int64)
    return int(x).bit_count()


def _flip(mask, i: int, low):
    # Image of the vertex set under v -> v ^ (1 << i).
    shift = 1 << i
    return ((mask & low) << shift) | ((mask >> shift) & low)


def _as_mask_type(mask, value: int):
    return mask.dtype.type(value) if isinstance(mask, np.ndarray) else value


def boundary_size_mask(mask, d: int):
    """Edge boundary of a bitmask vertex set; accepts an int or a numpy array of masks."""
    total = 0
    full = _as_mask_type(mask, (1 << (1 << d)) - 1)
    for i, low in enumerate(_direction_masks(d)):
        low = _as_mask_type(mask, low)
        total = total + _popcount(mask & (full ^ _flip(mask, i, low)))
    return total


def induced_edges_mask(mask, d: int):
    """e(S) for a bitmask vertex set."""
    total = 0
    for i, low in enumerate(_direction_masks(d)):
        low = _as_mask_type(mask, low)
        total = total + _popcount(mask & low & _flip(mask, i, low))
    return total


def induced_degrees_mask(mask, d: int) -> list:
    """Degree of every vertex ``v`` inside Q^d[S] (zero for v outside S), one entry per vertex."""
    n = 1 << d
    one = _as_mask_type(mask, 1)
    bits = [(mask >> _as_mask_type(mask, v)) & one for v in range(n)]
    return [sum(bits[v ^ (1 << i)] for i in range(d)) * bits[v] for v in range(n)]


def mask_from_vertices(S: Iterable[int]) -> int:
    mask = 0
    for v in S:
        mask |= 1 << v
    return mask


def vertices_from_mask(mask: int) -> list[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def subcube(fixed: dict[int, int], spec: CubeSpec) -> list[int]:
    """Vertices agreeing with ``fixed`` (direction -> bit) on the fixed coordinates."""
    return [v for v in range(spec.n) if all((v >> i) & 1 == b for i, b in fixed.items())]


def icbrt(n: int) -> int:
    """Floor of the real cube root of a nonnegative integer, exactly."""
    if n < 0:
        raise ValidationError("cube root of a negative integer")
    r = round(n ** (1.0 / 3.0))
    while r**3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def icbrt_ceil(n: int) -> int:
    r = icbrt(n)
    return r if r**3 == n else r + 1
