"""The three sampling regimes: Bernoulli subgraphs, uniform edge orders, two-round exposure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .cube import CubeSpec
from .errors import ValidationError
from .rng import RngStream


def _check_probability(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {p}")
    return p


@dataclass(eq=False)
class SubgraphSample:
    """A spanning subgraph of Q^d: ``edges[e]`` is True iff edge ``e`` is present."""

    spec: CubeSpec
    edges: np.ndarray

    def __post_init__(self) -> None:
        self.edges = np.asarray(self.edges, dtype=np.bool_)
        if self.edges.shape != (self.spec.m,):
            raise ValidationError(f"edge bitset must have length {self.spec.m}, got {self.edges.shape}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SubgraphSample):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.edges, other.edges)

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.edges))

    def edge_ids(self) -> np.ndarray:
        return np.flatnonzero(self.edges)

    def packed(self) -> bytes:
        """Bit-per-edge serialization, edge 0 in the least significant bit of byte 0."""
        return np.packbits(self.edges, bitorder="little").tobytes()

    def union(self, other: "SubgraphSample") -> "SubgraphSample":
        if other.spec != self.spec:
            raise ValidationError("samples live on different cubes")
        return SubgraphSample(self.spec, self.edges | other.edges)

    def with_edge(self, e: int) -> "SubgraphSample":
        edges = self.edges.copy()
        edges[e] = True
        return SubgraphSample(self.spec, edges)

    @classmethod
    def empty(cls, spec: CubeSpec) -> "SubgraphSample":
        return cls(spec, np.zeros(spec.m, dtype=np.bool_))

    @classmethod
    def full(cls, spec: CubeSpec) -> "SubgraphSample":
        return cls(spec, np.ones(spec.m, dtype=np.bool_))

    @classmethod
    def from_edge_ids(cls, spec: CubeSpec, ids) -> "SubgraphSample":
        edges = np.zeros(spec.m, dtype=np.bool_)
        edges[np.asarray(list(ids), dtype=np.int64)] = True
        return cls(spec, edges)


@dataclass(eq=False)
class ProcessOrder:
    spec: CubeSpec
    order: np.ndarray
    provenance: tuple[int, str, int] | None = None

    def prefix(self, t: int) -> SubgraphSample:
        """Q(t): the subgraph formed by the first ``t`` edges of the order."""
        if not 0 <= t <= self.spec.m:
            raise ValidationError(f"step {t} outside [0, {self.spec.m}]")
        return SubgraphSample.from_edge_ids(self.spec, self.order[:t])


def bernoulli_subgraph(spec: CubeSpec, p: float, rng: RngStream) -> SubgraphSample:
    """Keep each edge independently with probability ``p``; one draw per edge, in edge-id order."""
    p = _check_probability(p)
    edges = np.empty(spec.m, dtype=np.bool_)
    _rng.fill_bernoulli(rng.state, p, edges)
    return SubgraphSample(spec, edges)


def process_order(spec: CubeSpec, rng: RngStream) -> ProcessOrder:
    """Uniform permutation of the edge ids (descending Fisher-Yates)."""
    order = np.arange(spec.m, dtype=np.int64)
    _rng.shuffle_descending(rng.state, order)
    return ProcessOrder(spec, order, rng.provenance)


def split_probabilities(p: float, eps: float) -> tuple[float, float]:
    """Split ``p`` into two rounds with (1 - p1)(1 - p2) = 1 - p and p2 = eps."""
    p = _check_probability(p)
    eps = _check_probability(eps, "epsilon")
    if p == 1.0:
        return 1.0, eps
    if eps == 0.0:
        return p, 0.0
    if eps == 1.0:
        raise ValidationError("epsilon = 1 is only admissible with p = 1")
    if p < eps:
        raise ValidationError(f"p = {p} is below epsilon = {eps}")
    p1 = 1.0 - (1.0 - p) / (1.0 - eps)
    return min(max(p1, 0.0), 1.0), eps


def two_round_union(
    spec: CubeSpec, p: float, eps: float, rng: RngStream
) -> tuple[SubgraphSample, SubgraphSample, SubgraphSample]:
    """Round one at p1, then round two at p2 from the same stream; returns both rounds and their union."""
    p1, p2 = split_probabilities(p, eps)
    first = bernoulli_subgraph(spec, p1, rng)
    second = bernoulli_subgraph(spec, p2, rng)
    return first, second, first.union(second)
