"""Replay of the random hypercube process with incremental connectivity tracking."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .cube import CubeSpec, edge_lower
from .errors import ValidationError
from .rng import FNV_OFFSET, FNV_PRIME, RngStream
from .sampler import ProcessOrder, process_order


@dataclass(frozen=True)
class ProcessTrace:
    spec: CubeSpec
    tau_d: int
    tau_c: int
    order_digest: int
    master_seed: int | None = None
    label: str | None = None
    index: int | None = None

    @property
    def equal(self) -> bool:
        return self.tau_d == self.tau_c

    def to_dict(self) -> dict:
        return {
            "d": self.spec.d,
            "n": self.spec.n,
            "m": self.spec.m,
            "tau_d": self.tau_d,
            "tau_c": self.tau_c,
            "equal": self.equal,
            "order_digest": f"{self.order_digest:016x}",
            "provenance": {"seed": self.master_seed, "label": self.label, "index": self.index},
        }


@numba.njit(cache=True, nogil=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@numba.njit(cache=True, nogil=True)
def _hitting_times(order, n, half):
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    degree = np.zeros(n, dtype=np.int64)
    isolated = n
    components = n
    tau_d = 0
    for t in range(order.shape[0]):
        u, i = edge_lower(order[t], half)
        v = u | (1 << i)
        if degree[u] == 0:
            isolated -= 1
        if degree[v] == 0:
            isolated -= 1
        degree[u] += 1
        degree[v] += 1
        ru = _find(parent, u)
        rv = _find(parent, v)
        if ru != rv:
            if size[ru] < size[rv]:
                ru, rv = rv, ru
            parent[rv] = ru
            size[ru] += size[rv]
            components -= 1
        if tau_d == 0 and isolated == 0:
            tau_d = t + 1
        if components == 1:
            return tau_d, t + 1
    return tau_d, 0


@numba.njit(cache=True, nogil=True)
def _order_digest(order):
    h = np.uint64(FNV_OFFSET)
    prime = np.uint64(FNV_PRIME)
    for t in range(order.shape[0]):
        x = np.uint64(order[t])
        for _ in range(8):
            h = (h ^ (x & np.uint64(0xFF))) * prime
            x = x >> np.uint64(8)
    return h


def order_digest(order) -> int:
    """FNV-1a 64 over the edge ids, each as 8 little-endian bytes."""
    return int(_order_digest(np.ascontiguousarray(order, dtype=np.int64)))


def _as_order(spec: CubeSpec, order) -> tuple[np.ndarray, tuple | None]:
    if isinstance(order, ProcessOrder):
        if order.spec != spec:
            raise ValidationError("order was drawn for a different cube")
        return np.ascontiguousarray(order.order, dtype=np.int64), order.provenance
    return np.ascontiguousarray(order, dtype=np.int64), None


def run_process(spec: CubeSpec, order, *, check: bool = True) -> ProcessTrace:
    """Add edges in ``order`` one by one; report the steps at which the minimum
    degree first reaches one (tau_d) and the graph first becomes connected (tau_c).

    Steps are 1-based. ``order`` is a :class:`ProcessOrder` or any integer
    sequence that permutes ``range(spec.m)``.
    """
    arr, provenance = _as_order(spec, order)
    if check:
        if arr.shape != (spec.m,) or not np.array_equal(np.sort(arr), np.arange(spec.m)):
            raise ValidationError(f"order is not a permutation of range({spec.m})")
    tau_d, tau_c = _hitting_times(arr, spec.n, spec.half)
    seed, label, index = provenance if provenance is not None else (None, None, None)
    return ProcessTrace(spec, int(tau_d), int(tau_c), order_digest(arr), seed, label, index)


def sample_trace(spec: CubeSpec, rng: RngStream) -> ProcessTrace:
    return run_process(spec, process_order(spec, rng), check=False)


def hitting_equality_trial(spec: CubeSpec, rng: RngStream) -> bool:
    order = process_order(spec, rng)
    tau_d, tau_c = _hitting_times(order.order, spec.n, spec.half)
    return bool(tau_d == tau_c)
