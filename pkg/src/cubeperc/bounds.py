"""Closed-form union-bound expressions, evaluated in natural-log space.

Every ``log_*`` function returns the natural logarithm of the quantity
(``-inf`` for an exact zero); the plain function exponentiates at the end,
so very large bounds overflow to ``inf`` rather than raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cube import CubeSpec, icbrt, icbrt_ceil
from .errors import ValidationError

NEG_INF = -math.inf


def _check_p(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {p}")
    return p


def _log1m(x: float) -> float:
    """log(1 - x) for x in [0, 1]."""
    return NEG_INF if x >= 1.0 else math.log1p(-x)


def _exp(x: float) -> float:
    if x == NEG_INF:
        return 0.0
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _logsumexp(values: np.ndarray) -> float:
    if values.size == 0:
        return NEG_INF
    top = float(values.max())
    if top == NEG_INF:
        return NEG_INF
    return top + math.log(math.fsum(np.exp(values - top)))


def log_expected_isolated(d: int, p: float) -> float:
    spec = CubeSpec(d)
    p = _check_p(p)
    return spec.d * math.log(2) + spec.d * _log1m(p)


def expected_isolated(d: int, p: float) -> float:
    """n (1 - p)^d."""
    return _exp(log_expected_isolated(d, p))


def log_adjacent_isolated_bound(d: int, p: float) -> float:
    spec = CubeSpec(d)
    p = _check_p(p)
    return math.log(spec.m) + (2 * spec.d - 1) * _log1m(p)


def adjacent_isolated_bound(d: int, p: float) -> float:
    """(n d / 2)(1 - p)^(2d - 1): union bound on two adjacent vertices both being isolated."""
    return _exp(log_adjacent_isolated_bound(d, p))


def log_mid_component_bound(d: int, p: float) -> float:
    spec = CubeSpec(d)
    p = _check_p(p)
    top = icbrt(spec.n)
    if p == 1.0 or top < 2:
        return NEG_INF
    k = np.arange(2, top + 1, dtype=np.float64)
    exponent = np.maximum(spec.d - 2.0 * np.log2(k), 0.0)
    terms = spec.d * math.log(2) + (k - 1) * math.log(math.e * spec.d) + k * exponent * _log1m(p)
    return _logsumexp(terms)


def mid_component_bound(d: int, p: float) -> float:
    """Sum over k = 2..floor(n^(1/3)) of n (ed)^(k-1) (1-p)^(k (d - 2 log2 k)).

    Negative exponents ``d - 2 log2 k`` are clamped at zero.
    """
    return _exp(log_mid_component_bound(d, p))


def log_no_isolated_upper_bound(d: int, p: float) -> float:
    spec = CubeSpec(d)
    p = _check_p(p)
    q = _exp(spec.d * _log1m(p))
    return (spec.n / 2) * _log1m(q)


def no_isolated_upper_bound(d: int, p: float) -> float:
    """(1 - (1 - p)^d)^(n/2)."""
    return _exp(log_no_isolated_upper_bound(d, p))


def _log_geometric_sum(r: float, first: int, last: int) -> float:
    # log of sum_{a=first}^{last} exp(a r)
    count = last - first + 1
    if count <= 0:
        return NEG_INF
    if r == 0.0:
        return math.log(count)
    if r > 0.0:
        return last * r + math.log(-math.expm1(-count * r)) - math.log(-math.expm1(-r))
    return first * r + math.log(-math.expm1(count * r)) - math.log(-math.expm1(r))


def log_sprinkling_failure_bound(d: int, eps: float) -> float:
    spec = CubeSpec(d)
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValidationError(f"epsilon must lie in (0, 1), got {eps}")
    cbrt_n = 2.0 ** (spec.d / 3.0)
    rate = spec.d * math.log(2) / cbrt_n - eps / 2.0
    return _log_geometric_sum(rate, icbrt_ceil(spec.n), spec.n // 2)


def sprinkling_failure_bound(d: int, eps: float) -> float:
    """Sum over a = ceil(n^(1/3))..floor(n/2) of n^(a / n^(1/3)) exp(-eps a / 2).

    The sum is geometric in ``a`` and is evaluated in closed form.
    """
    return _exp(log_sprinkling_failure_bound(d, eps))


@lru_cache(maxsize=64)
def _binomial_tables(trials: int, q: float) -> tuple[np.ndarray, np.ndarray]:
    # (pmf, cdf) over 0..trials, normalised by the log-space total.
    j = np.arange(trials + 1)
    if q == 0.0 or q == 1.0:
        pmf = np.zeros(trials + 1)
        pmf[0 if q == 0.0 else trials] = 1.0
        return pmf, np.cumsum(pmf)
    lg = np.array([math.lgamma(x + 1) for x in range(trials + 1)])
    logs = lg[-1] - lg - lg[::-1] + j * math.log(q) + (trials - j) * math.log1p(-q)
    top = float(logs.max())
    weights = np.exp(logs - top)
    total = math.fsum(weights)
    pmf = weights / total
    # Cumulative sums from both ends keep the tails accurate.
    head = np.cumsum(pmf)
    tail = np.cumsum(pmf[::-1])[::-1]
    cdf = np.where(head <= 0.5, head, 1.0 - np.concatenate([tail[1:], [0.0]]))
    return pmf, np.minimum(cdf, 1.0)


def binomial_pmf(trials: int, q: float) -> np.ndarray:
    """Probabilities of Bin(trials, q) at 0..trials."""
    if trials < 0:
        raise ValidationError("trials must be nonnegative")
    return _binomial_tables(int(trials), _check_p(q, "q"))[0].copy()


def binomial_cdf(trials: int, q: float, t: int) -> float:
    """P[Bin(trials, q) <= t] from log-space binomial terms."""
    if trials < 0:
        raise ValidationError("trials must be nonnegative")
    q = _check_p(q, "q")
    if t < 0:
        return 0.0
    cdf = _binomial_tables(int(trials), q)[1]
    return float(cdf[min(t, trials)])


@dataclass(frozen=True)
class BoundsReport:
    d: int
    p: float
    eps: float
    expected_isolated: float
    adjacent_isolated_bound: float
    mid_component_bound: float
    no_isolated_upper_bound: float
    sprinkling_failure_bound: float
    log_values: dict

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "p": self.p,
            "eps": self.eps,
            "expected_isolated": self.expected_isolated,
            "adjacent_isolated_bound": self.adjacent_isolated_bound,
            "mid_component_bound": self.mid_component_bound,
            "no_isolated_upper_bound": self.no_isolated_upper_bound,
            "sprinkling_failure_bound": self.sprinkling_failure_bound,
            "log": dict(self.log_values),
        }


def bounds_report(d: int, p: float, eps: float) -> BoundsReport:
    logs = {
        "expected_isolated": log_expected_isolated(d, p),
        "adjacent_isolated_bound": log_adjacent_isolated_bound(d, p),
        "mid_component_bound": log_mid_component_bound(d, p),
        "no_isolated_upper_bound": log_no_isolated_upper_bound(d, p),
        "sprinkling_failure_bound": log_sprinkling_failure_bound(d, eps),
    }
    return BoundsReport(d=d, p=p, eps=eps, log_values=logs, **{k: _exp(v) for k, v in logs.items()})
