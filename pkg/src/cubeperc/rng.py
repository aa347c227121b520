"""Seedable, portable random streams.

A stream is identified by ``(master_seed, label, index)``. Its 256-bit
xoshiro256** state is four successive SplitMix64 outputs started from
``master_seed ^ fnv1a64(label) ^ (index * INDEX_MULTIPLIER)`` (mod 2**64).

Reals are ``(x >> 11) * 2**-53``; bounded integers reject draws below
``2**64 mod bound`` and reduce the rest modulo ``bound``. Everything here is
bit-exact across platforms.
"""

from __future__ import annotations

import numba
import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
INDEX_MULTIPLIER = 0xD1B54A32D192ED03
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & MASK64
    return h


def splitmix64(state: int) -> tuple[int, int]:
    """One SplitMix64 step: returns ``(next_state, output)``."""
    state = (state + GOLDEN_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def stream_seed(master_seed: int, label: str, index: int) -> int:
    return (
        (master_seed & MASK64)
        ^ fnv1a64(label.encode("ascii"))
        ^ ((index * INDEX_MULTIPLIER) & MASK64)
    )


def initial_state(master_seed: int, label: str, index: int) -> tuple[int, int, int, int]:
    s = stream_seed(master_seed, label, index)
    words = []
    for _ in range(4):
        s, out = splitmix64(s)
        words.append(out)
    return tuple(words)


# Kernels. State is a uint64[4] array mutated in place.


@numba.njit(cache=True, nogil=True)
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@numba.njit(cache=True, nogil=True)
def next_u64(s):
    result = _rotl(s[1] * np.uint64(5), 7) * np.uint64(9)
    t = s[1] << np.uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@numba.njit(cache=True, nogil=True)
def next_double(s):
    return np.float64(next_u64(s) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@numba.njit(cache=True, nogil=True)
def next_below(s, bound):
    b = np.uint64(bound)
    threshold = (np.uint64(0) - b) % b
    while True:
        x = next_u64(s)
        if x >= threshold:
            return x % b


@numba.njit(cache=True, nogil=True)
def fill_bernoulli(s, p, out):
    for e in range(out.shape[0]):
        out[e] = next_double(s) < p


@numba.njit(cache=True, nogil=True)
def shuffle_descending(s, a):
    for i in range(a.shape[0] - 1, 0, -1):
        j = np.int64(next_below(s, np.uint64(i + 1)))
        tmp = a[i]
        a[i] = a[j]
        a[j] = tmp


class RngStream:
    """A xoshiro256** generator bound to its derivation triple.

    Each trial owns its stream; streams are never shared between workers.
    """

    __slots__ = ("master_seed", "label", "index", "state")

    def __init__(self, master_seed: int, label: str, index: int):
        self.master_seed = master_seed
        self.label = label
        self.index = index
        self.state = np.array(initial_state(master_seed, label, index), dtype=np.uint64)

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, label={self.label!r}, index={self.index})"

    @property
    def provenance(self) -> tuple[int, str, int]:
        return self.master_seed, self.label, self.index

    def next_u64(self) -> int:
        return int(next_u64(self.state))

    def random(self) -> float:
        return float(next_double(self.state))

    def randbelow(self, bound: int) -> int:
        if not 1 <= bound <= MASK64:
            raise ValueError("bound must lie in [1, 2**64)")
        return int(next_below(self.state, np.uint64(bound)))

    def copy(self) -> "RngStream":
        other = object.__new__(RngStream)
        other.master_seed, other.label, other.index = self.provenance
        other.state = self.state.copy()
        return other


def derive_stream(master_seed: int, label: str, index: int) -> RngStream:
    return RngStream(master_seed, label, index)
