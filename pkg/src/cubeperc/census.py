"""Component structure of a sampled subgraph and the giant/isolated verdict."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .cube import CubeSpec, edge_id, icbrt_ceil
from .errors import ValidationError
from .sampler import SubgraphSample

DEFAULT_THRESHOLD = 0.99


@numba.njit(cache=True, nogil=True)
def _bfs_labels(edges, d):
    n = 1 << d
    half = n >> 1
    labels = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    count = 0
    for root in range(n):
        if labels[root] >= 0:
            continue
        labels[root] = count
        head = 0
        tail = 1
        queue[0] = root
        while head < tail:
            v = queue[head]
            head += 1
            for i in range(d):
                w = v ^ (1 << i)
                if labels[w] >= 0:
                    continue
                if edges[edge_id(v & ~(1 << i), i, half)]:
                    labels[w] = count
                    queue[tail] = w
                    tail += 1
        count += 1
    return labels, count


@numba.njit(cache=True, nogil=True)
def _is_connected(edges, d):
    n = 1 << d
    half = n >> 1
    seen = np.zeros(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    seen[0] = True
    head = 0
    tail = 1
    queue[0] = 0
    while head < tail:
        v = queue[head]
        head += 1
        for i in range(d):
            w = v ^ (1 << i)
            if not seen[w] and edges[edge_id(v & ~(1 << i), i, half)]:
                seen[w] = True
                queue[tail] = w
                tail += 1
    return tail == n


@numba.njit(cache=True, nogil=True)
def _degrees(edges, d):
    n = 1 << d
    half = n >> 1
    deg = np.zeros(n, dtype=np.int64)
    for e in range(edges.shape[0]):
        if edges[e]:
            i = e // half
            r = e - i * half
            u = (r & ((1 << i) - 1)) | ((r >> i) << (i + 1))
            deg[u] += 1
            deg[u | (1 << i)] += 1
    return deg


@numba.njit(cache=True, nogil=True)
def _min_pairwise_hamming(vertices):
    best = 64
    k = vertices.shape[0]
    for a in range(k):
        for b in range(a + 1, k):
            x = vertices[a] ^ vertices[b]
            c = 0
            while x:
                x &= x - 1
                c += 1
            if c < best:
                best = c
                if best == 1:
                    return 1
    return best


def _check(spec: CubeSpec, sample: SubgraphSample) -> None:
    if sample.spec != spec:
        raise ValidationError(f"sample is on Q^{sample.spec.d}, expected Q^{spec.d}")


def degrees(sample: SubgraphSample) -> np.ndarray:
    return _degrees(sample.edges, sample.spec.d)


def isolated_vertices(sample: SubgraphSample) -> np.ndarray:
    return np.flatnonzero(degrees(sample) == 0)


def isolated_count(sample: SubgraphSample) -> int:
    return int(np.count_nonzero(degrees(sample) == 0))


def is_connected(sample: SubgraphSample) -> bool:
    return bool(_is_connected(sample.edges, sample.spec.d))


def component_labels(sample: SubgraphSample) -> tuple[np.ndarray, int]:
    labels, count = _bfs_labels(sample.edges, sample.spec.d)
    return labels, int(count)


def mid_window(spec: CubeSpec) -> tuple[int, int]:
    """Inclusive component-order window [2, ceil(n^(1/3))]."""
    return 2, icbrt_ceil(spec.n)


def min_isolated_distance(spec: CubeSpec, sample: SubgraphSample) -> int | None:
    """Smallest Hamming distance between two isolated vertices, or None with fewer than two."""
    _check(spec, sample)
    return _min_isolated(isolated_vertices(sample))


def _min_isolated(isolated: np.ndarray) -> int | None:
    if isolated.shape[0] < 2:
        return None
    return int(_min_pairwise_hamming(isolated.astype(np.int64)))


@dataclass(frozen=True)
class ComponentCensus:
    spec: CubeSpec
    sizes: tuple[int, ...]
    isolated: tuple[int, ...]
    mid_components: int
    non_giant_non_isolated: int
    min_isolated_hamming: int | None

    @property
    def giant_size(self) -> int:
        return self.sizes[0]

    @property
    def component_count(self) -> int:
        return len(self.sizes)

    def count_sizes_between(self, lo: int, hi: int) -> int:
        return sum(1 for s in self.sizes if lo <= s <= hi)

    def to_dict(self) -> dict:
        return {
            "d": self.spec.d,
            "n": self.spec.n,
            "component_count": self.component_count,
            "giant_size": self.giant_size,
            "sizes": list(self.sizes),
            "isolated": list(self.isolated),
            "mid_components": self.mid_components,
            "non_giant_non_isolated": self.non_giant_non_isolated,
            "min_isolated_hamming": self.min_isolated_hamming,
        }


def components(spec: CubeSpec, sample: SubgraphSample) -> ComponentCensus:
    _check(spec, sample)
    labels, count = component_labels(sample)
    counts = np.bincount(labels, minlength=count)
    sizes = tuple(int(s) for s in np.sort(counts)[::-1])
    isolated = isolated_vertices(sample)
    lo, hi = mid_window(spec)
    return ComponentCensus(
        spec=spec,
        sizes=sizes,
        isolated=tuple(int(v) for v in isolated),
        mid_components=sum(1 for s in sizes if lo <= s <= hi),
        non_giant_non_isolated=sum(1 for s in sizes[1:] if s >= 2),
        min_isolated_hamming=_min_isolated(isolated),
    )


@dataclass(frozen=True)
class PropositionVerdict:
    giant_fraction: float
    others_all_isolated: bool
    isolated_pairwise_far: bool
    threshold: float = DEFAULT_THRESHOLD

    def holds_at(self, threshold: float) -> bool:
        return self.giant_fraction >= threshold and self.others_all_isolated and self.isolated_pairwise_far

    @property
    def holds(self) -> bool:
        return self.holds_at(self.threshold)

    def to_dict(self) -> dict:
        return {
            "giant_fraction": self.giant_fraction,
            "others_all_isolated": self.others_all_isolated,
            "isolated_pairwise_far": self.isolated_pairwise_far,
            "threshold": self.threshold,
            "holds": self.holds,
        }


def proposition_verdict(census: ComponentCensus, threshold: float = DEFAULT_THRESHOLD) -> PropositionVerdict:
    if not 0.0 < threshold <= 1.0:
        raise ValidationError(f"threshold must lie in (0, 1], got {threshold}")
    dist = census.min_isolated_hamming
    return PropositionVerdict(
        giant_fraction=census.giant_size / census.spec.n,
        others_all_isolated=census.non_giant_non_isolated == 0,
        isolated_pairwise_far=dist is None or dist >= 2,
        threshold=threshold,
    )
