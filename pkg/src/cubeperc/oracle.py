"""Brute-force ground truth for small cubes.

Nothing here shares a traversal or counting routine with the modules it is
used to check: subset sweeps work on vertex bitmasks, connectivity is a
bitmask closure, and tree counts come from connected-set enumeration plus the
matrix-tree theorem over exact integers.

Feasibility caps are hard: d <= 4 for vertex-subset sweeps, d <= 3 for
edge-subset enumeration, d <= 2 for edge-order enumeration, and d <= 6,
k <= 8 for tree counting. Requests beyond a cap raise FeasibilityError.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from . import cube
from .cube import CubeSpec
from .errors import FeasibilityError, ValidationError
from .hitting import run_process

MAX_SUBSET_DIM = 4
MAX_EDGE_SUBSET_DIM = 3
MAX_ORDER_DIM = 2
MAX_TREE_DIM = 6
MAX_TREE_SIZE = 8
# Slack for comparisons against bounds that involve log2.
_TOL = 1e-9


@dataclass
class SweepReport:
    name: str
    d: int
    subsets_checked: int = 0
    tight_witnesses: int = 0
    violations: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations

    def merge(self, other: "SweepReport") -> "SweepReport":
        if (other.name, other.d) != (self.name, self.d):
            raise ValidationError("cannot merge reports of different sweeps")
        return SweepReport(
            self.name,
            self.d,
            self.subsets_checked + other.subsets_checked,
            self.tight_witnesses + other.tight_witnesses,
            self.violations + other.violations,
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "d": self.d,
            "subsets_checked": self.subsets_checked,
            "tight_witnesses": self.tight_witnesses,
            "violations": [
                {"subset": f"{mask:#x}", "bound": bound, "actual": actual}
                for mask, bound, actual in self.violations
            ],
            "holds": self.holds,
        }


def _check_subset_dim(d: int) -> CubeSpec:
    spec = CubeSpec(d)
    if spec.d > MAX_SUBSET_DIM:
        raise FeasibilityError(f"subset sweeps need d <= {MAX_SUBSET_DIM}; 2^(2^{d}) subsets is infeasible")
    return spec


def _all_masks(spec: CubeSpec, lo: int = 1, hi: int | None = None) -> np.ndarray:
    hi = (1 << spec.n) if hi is None else hi
    return np.arange(lo, hi, dtype=np.uint64)


def _report(name: str, d: int, masks: np.ndarray, bound: np.ndarray, actual: np.ndarray) -> SweepReport:
    bad = np.flatnonzero(actual < bound - _TOL)
    tight = int(np.count_nonzero(np.abs(actual - bound) <= _TOL))
    violations = [(int(masks[j]), float(bound[j]), float(actual[j])) for j in bad]
    return SweepReport(name, d, int(masks.shape[0]), tight, violations)


def verify_harper_small(d: int, masks: np.ndarray | None = None) -> SweepReport:
    """e(S, S^C) >= |S| (d - 2 log2 |S|) for every nonempty S; negative bounds count as 0."""
    spec = _check_subset_dim(d)
    masks = _all_masks(spec) if masks is None else masks
    size = np.bitwise_count(masks).astype(np.float64)
    bound = np.maximum(size * (spec.d - 2.0 * np.log2(size)), 0.0)
    actual = cube.boundary_size_mask(masks, spec.d).astype(np.float64)
    return _report("harper_small", spec.d, masks, bound, actual)


def verify_harper_big(d: int, masks: np.ndarray | None = None) -> SweepReport:
    """e(S, S^C) >= |S| for every S with 1 <= |S| <= 2^(d-1)."""
    spec = _check_subset_dim(d)
    masks = _all_masks(spec) if masks is None else masks
    size = np.bitwise_count(masks).astype(np.int64)
    masks = masks[size <= spec.half]
    size = size[size <= spec.half]
    actual = cube.boundary_size_mask(masks, spec.d)
    return _report("harper_big", spec.d, masks, size.astype(np.float64), actual.astype(np.float64))


def verify_min_degree_size(d: int, masks: np.ndarray | None = None) -> SweepReport:
    """|S| >= 2^delta with delta the minimum degree of Q^d[S], and e(S) <= |S| log2 |S|.

    A subset fails if either inequality fails; its entry records the failing
    bound and value of the first failing inequality.
    """
    spec = _check_subset_dim(d)
    masks = _all_masks(spec) if masks is None else masks
    size = np.bitwise_count(masks).astype(np.int64)
    degs = cube.induced_degrees_mask(masks, spec.d)
    big = np.int64(spec.d + 1)
    delta = np.full(masks.shape, big, dtype=np.int64)
    one = masks.dtype.type(1)
    for v in range(spec.n):
        member = ((masks >> masks.dtype.type(v)) & one).astype(bool)
        delta = np.where(member, np.minimum(delta, np.asarray(degs[v], dtype=np.int64)), delta)
    edges = cube.induced_edges_mask(masks, spec.d).astype(np.float64)
    size_f = size.astype(np.float64)
    first = _report("min_degree_size", spec.d, masks, np.exp2(delta.astype(np.float64)), size_f)
    second = _report("min_degree_size", spec.d, masks, edges, size_f * np.log2(size_f))
    failed = {mask for mask, _, _ in first.violations}
    violations = first.violations + [v for v in second.violations if v[0] not in failed]
    tight = int(np.count_nonzero(np.exp2(delta) == size_f))
    return SweepReport("min_degree_size", spec.d, int(masks.shape[0]), tight, violations)


def verify_all(d: int) -> list[SweepReport]:
    return [verify_harper_small(d), verify_harper_big(d), verify_min_degree_size(d)]


def verify_partitioned(d: int, parts: int) -> list[SweepReport]:
    """Same as :func:`verify_all`, sweeping the subset range in independent chunks and merging."""
    spec = _check_subset_dim(d)
    total = 1 << spec.n
    cuts = [1 + (total - 1) * j // parts for j in range(parts + 1)]
    merged = None
    for lo, hi in zip(cuts, cuts[1:]):
        masks = _all_masks(spec, lo, hi)
        chunk = [verify_harper_small(d, masks), verify_harper_big(d, masks), verify_min_degree_size(d, masks)]
        merged = chunk if merged is None else [a.merge(b) for a, b in zip(merged, chunk)]
    return merged


def degeneracy_core(adjacency: Mapping[int, Iterable[int]]) -> set[int]:
    """Peel vertices of degree below half the (fixed) input average degree.

    The surviving vertex set is nonempty and induces minimum degree at least
    that half-average.
    """
    nbrs = {v: set(ws) for v, ws in adjacency.items()}
    for v, ws in list(nbrs.items()):
        for w in ws:
            nbrs.setdefault(w, set()).add(v)
    edge_total = sum(len(ws) for ws in nbrs.values()) // 2
    if not nbrs or edge_total == 0:
        raise ValidationError("graph has no edges")
    cutoff = edge_total / len(nbrs)  # half of 2|E|/|V|
    alive = set(nbrs)
    deg = {v: len(ws) for v, ws in nbrs.items()}
    stack = [v for v in alive if deg[v] < cutoff]
    while stack:
        v = stack.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for w in nbrs[v]:
            if w in alive:
                deg[w] -= 1
                if deg[w] < cutoff:
                    stack.append(w)
    return alive


def induced_adjacency(S: Iterable[int], spec: CubeSpec) -> dict[int, set[int]]:
    members = set(S)
    return {v: {v ^ (1 << i) for i in range(spec.d) if v ^ (1 << i) in members} for v in members}


def bareiss_determinant(matrix: list[list[int]]) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    a = [list(row) for row in matrix]
    size = len(a)
    if size == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(size - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, size) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def spanning_tree_count(vertices: list[int], spec: CubeSpec) -> int:
    """Matrix-tree theorem on Q^d[vertices]: any cofactor of the Laplacian."""
    index = {v: j for j, v in enumerate(vertices)}
    size = len(vertices)
    lap = [[0] * size for _ in range(size)]
    for v, a in index.items():
        for i in range(spec.d):
            b = index.get(v ^ (1 << i))
            if b is not None:
                lap[a][b] = -1
                lap[a][a] += 1
    return bareiss_determinant([row[1:] for row in lap[1:]])


def connected_sets_containing(spec: CubeSpec, root: int, k: int):
    """Each connected vertex set of size ``k`` containing ``root``, exactly once.

    Binary branching on the smallest candidate boundary vertex: include it
    (its fresh neighbours join the candidates) or exclude it for the rest of
    the branch.
    """

    def grow(chosen: list[int], candidates: frozenset, excluded: frozenset):
        if len(chosen) == k:
            yield tuple(chosen)
            return
        cands = set(candidates)
        blocked = set(excluded)
        while cands:
            w = min(cands)
            cands.discard(w)
            fresh = {
                w ^ (1 << i) for i in range(spec.d)
            } - blocked - cands - set(chosen)
            chosen.append(w)
            yield from grow(chosen, frozenset(cands | fresh), frozenset(blocked | {w}))
            chosen.pop()
            blocked.add(w)

    start = frozenset(root ^ (1 << i) for i in range(spec.d))
    yield from grow([root], start, frozenset({root}))


def count_rooted_trees(spec: CubeSpec, v: int, k: int) -> int:
    """t(v, k): the number of k-vertex subtrees of Q^d that contain ``v``."""
    if spec.d > MAX_TREE_DIM or k > MAX_TREE_SIZE:
        raise FeasibilityError(f"tree counting needs d <= {MAX_TREE_DIM} and k <= {MAX_TREE_SIZE}")
    if k < 1:
        raise ValidationError("k must be positive")
    if not 0 <= v < spec.n:
        raise ValidationError(f"vertex {v} outside [0, {spec.n})")
    return sum(spanning_tree_count(list(U), spec) for U in connected_sets_containing(spec, v, k))


@dataclass(frozen=True)
class TreeCountCheck:
    d: int
    k: int
    count: int
    e_bound: float
    cayley_bound: float

    @property
    def within_e_bound(self) -> bool:
        return self.count <= self.e_bound

    @property
    def within_cayley_bound(self) -> bool:
        return self.count <= self.cayley_bound


def tree_count_check(spec: CubeSpec, v: int, k: int) -> TreeCountCheck:
    """t(v,k) beside (e d)^(k-1) and k^(k-2) d^(k-1) / (k-1)!."""
    count = count_rooted_trees(spec, v, k)
    e_bound = (math.e * spec.d) ** (k - 1)
    cayley = 1.0 if k == 1 else k ** (k - 2) * spec.d ** (k - 1) / math.factorial(k - 1)
    return TreeCountCheck(spec.d, k, count, e_bound, cayley)


def _edge_masks(spec: CubeSpec) -> list[tuple[int, int]]:
    return [cube.edge_endpoints(e, spec) for e in range(spec.m)]


def _spans_connected(spec: CubeSpec, ends: list[tuple[int, int]], subset: int) -> bool:
    # Grow the reachable vertex mask from vertex 0 until it stops changing.
    reach = 1
    full = (1 << spec.n) - 1
    chosen = [ends[e] for e in range(spec.m) if (subset >> e) & 1]
    while True:
        grown = reach
        for u, w in chosen:
            if (grown >> u) & 1 or (grown >> w) & 1:
                grown |= (1 << u) | (1 << w)
        if grown == reach:
            return reach == full
        reach = grown


def connected_spanning_counts(d: int) -> list[int]:
    """c[j] = number of j-edge subsets of Q^d whose graph is connected on all n vertices."""
    spec = CubeSpec(d)
    if spec.d > MAX_EDGE_SUBSET_DIM:
        raise FeasibilityError(f"edge-subset enumeration needs d <= {MAX_EDGE_SUBSET_DIM}")
    ends = _edge_masks(spec)
    counts = [0] * (spec.m + 1)
    for subset in range(1 << spec.m):
        if subset.bit_count() >= spec.n - 1 and _spans_connected(spec, ends, subset):
            counts[subset.bit_count()] += 1
    return counts


def exact_connectivity_probability(d: int, p):
    """P[Q^d_p is connected], summed over every edge subset.

    Returns a Fraction when ``p`` is a Fraction or int, a float otherwise.
    """
    if not 0 <= p <= 1:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    counts = connected_spanning_counts(d)
    m = len(counts) - 1
    if isinstance(p, (Fraction, int)):
        p = Fraction(p)
        return sum(c * p**j * (1 - p) ** (m - j) for j, c in enumerate(counts))
    return math.fsum(c * p**j * (1 - p) ** (m - j) for j, c in enumerate(counts))


def exact_hitting_distribution(d: int) -> Counter:
    """Counts of (tau_d, tau_c) over all m! edge orders."""
    spec = CubeSpec(d)
    if spec.d > MAX_ORDER_DIM:
        raise FeasibilityError(f"edge-order enumeration needs d <= {MAX_ORDER_DIM}")
    dist: Counter = Counter()
    for order in itertools.permutations(range(spec.m)):
        trace = run_process(spec, order)
        dist[(trace.tau_d, trace.tau_c)] += 1
    return dist


def exact_hitting_equality_probability(d: int) -> Fraction:
    dist = exact_hitting_distribution(d)
    total = sum(dist.values())
    return Fraction(sum(c for (td, tc), c in dist.items() if td == tc), total)
