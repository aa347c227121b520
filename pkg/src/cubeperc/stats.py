"""Monte Carlo harness and the small amount of statistics it needs."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

from .bounds import binomial_cdf
from .errors import TrialError, ValidationError
from .rng import RngStream, derive_stream

T = TypeVar("T")

DEFAULT_Z = 1.96

# Upper critical values of the chi-square distribution, df = 1..64.
_CHI2_01 = (
    6.6349, 9.2103, 11.3449, 13.2767, 15.0863, 16.8119, 18.4753, 20.0902,
    21.6660, 23.2093, 24.7250, 26.2170, 27.6882, 29.1412, 30.5779, 31.9999,
    33.4087, 34.8053, 36.1909, 37.5662, 38.9322, 40.2894, 41.6384, 42.9798,
    44.3141, 45.6417, 46.9629, 48.2782, 49.5879, 50.8922, 52.1914, 53.4858,
    54.7755, 56.0609, 57.3421, 58.6192, 59.8925, 61.1621, 62.4281, 63.6907,
    64.9501, 66.2062, 67.4593, 68.7095, 69.9568, 71.2014, 72.4433, 73.6826,
    74.9195, 76.1539, 77.3860, 78.6158, 79.8433, 81.0688, 82.2921, 83.5134,
    84.7328, 85.9502, 87.1657, 88.3794, 89.5913, 90.8015, 92.0100, 93.2169,
)
_CHI2_001 = (
    10.8276, 13.8155, 16.2662, 18.4668, 20.5150, 22.4577, 24.3219, 26.1245,
    27.8772, 29.5883, 31.2641, 32.9095, 34.5282, 36.1233, 37.6973, 39.2524,
    40.7902, 42.3124, 43.8202, 45.3147, 46.7970, 48.2679, 49.7282, 51.1786,
    52.6197, 54.0520, 55.4760, 56.8923, 58.3012, 59.7031, 61.0983, 62.4872,
    63.8701, 65.2472, 66.6188, 67.9852, 69.3465, 70.7029, 72.0547, 73.4020,
    74.7449, 76.0838, 77.4186, 78.7495, 80.0767, 81.4003, 82.7204, 84.0371,
    85.3506, 86.6608, 87.9680, 89.2722, 90.5734, 91.8718, 93.1675, 94.4605,
    95.7510, 97.0388, 98.3242, 99.6072, 100.8879, 102.1662, 103.4424, 104.7163,
)
CHI2_CRITICAL = {0.01: _CHI2_01, 0.001: _CHI2_001}


def chi2_critical(df: int, alpha: float = 0.001) -> float:
    if alpha not in CHI2_CRITICAL:
        raise ValidationError(f"no critical values tabulated for alpha={alpha}")
    if not 1 <= df <= 64:
        raise ValidationError(f"df must lie in [1, 64], got {df}")
    return CHI2_CRITICAL[alpha][df - 1]


def _wilson_lower(successes: int, trials: int, z: float) -> float:
    if successes == 0:
        return 0.0
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (phat + z2 / (2 * trials)) / denom
    half = z / denom * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials))
    return max(0.0, centre - half)


def wilson_interval(successes: int, trials: int, z: float = DEFAULT_Z) -> tuple[float, float]:
    """Wilson score interval; mirror-symmetric (to rounding) under successes <-> failures."""
    if trials < 1 or not 0 <= successes <= trials:
        raise ValidationError(f"need 0 <= successes <= trials and trials >= 1, got {successes}/{trials}")
    if z <= 0:
        raise ValidationError("z must be positive")
    phat = successes / trials
    low = min(_wilson_lower(successes, trials, z), phat)
    high = max(1.0 - _wilson_lower(trials - successes, trials, z), phat)
    return low, high


@dataclass(frozen=True)
class MCEstimate:
    successes: int
    trials: int
    p_hat: float
    ci_low: float
    ci_high: float
    z: float
    master_seed: int
    label: str

    @classmethod
    def from_counts(cls, successes: int, trials: int, master_seed: int, label: str, z: float = DEFAULT_Z):
        low, high = wilson_interval(successes, trials, z)
        return cls(successes, trials, successes / trials, low, high, z, master_seed, label)

    @property
    def sigma(self) -> float:
        """Binomial standard error at p_hat."""
        return math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.trials)

    def to_dict(self) -> dict:
        return asdict(self)


def _chunks(trials: int, workers: int) -> list[range]:
    cuts = [trials * j // workers for j in range(workers + 1)]
    return [range(a, b) for a, b in zip(cuts, cuts[1:]) if b > a]


def mc_map(
    trial: Callable[[RngStream], T],
    trials: int,
    master_seed: int,
    label: str,
    workers: int = 1,
) -> list[T]:
    """Run ``trial(derive_stream(master_seed, label, i))`` for each i; results in index order.

    Workers take disjoint contiguous index ranges. The output does not depend
    on ``workers``. If trials raise, :class:`TrialError` names the smallest
    failing index.
    """
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    if workers < 1:
        raise ValidationError("workers must be at least 1")
    results: list = [None] * trials
    failures: list[tuple[int, BaseException]] = []

    def run(indices: range) -> None:
        for i in indices:
            try:
                results[i] = trial(derive_stream(master_seed, label, i))
            except Exception as exc:  # noqa: BLE001 - re-raised with its index below
                failures.append((i, exc))
                return

    chunks = _chunks(trials, workers)
    if len(chunks) == 1:
        run(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            list(pool.map(run, chunks))
    if failures:
        index, exc = min(failures, key=lambda f: f[0])
        raise TrialError(index, exc) from exc
    return results


def mc_estimate(
    trial: Callable[[RngStream], bool],
    trials: int,
    master_seed: int,
    label: str,
    workers: int = 1,
    z: float = DEFAULT_Z,
) -> MCEstimate:
    outcomes = mc_map(trial, trials, master_seed, label, workers)
    return MCEstimate.from_counts(sum(1 for x in outcomes if x), trials, master_seed, label, z)


def chi_square_statistic(observed: Sequence[float], expected: Sequence[float]) -> float:
    obs = np.asarray(observed, dtype=np.float64)
    exp = np.asarray(expected, dtype=np.float64)
    if obs.shape != exp.shape or obs.ndim != 1 or obs.shape[0] < 2:
        raise ValidationError("need two equally long 1-d bin arrays with at least 2 bins")
    if np.any(exp <= 0):
        raise ValidationError("expected counts must be positive; merge empty bins first")
    return float(np.sum((obs - exp) ** 2 / exp))


def merge_small_bins(
    observed: Sequence[float], expected: Sequence[float], minimum: float = 5.0
) -> tuple[np.ndarray, np.ndarray]:
    """Fold adjacent bins together until every expected count reaches ``minimum``.

    Bins are accumulated left to right; a short final group joins the previous one.
    """
    obs_out: list[float] = []
    exp_out: list[float] = []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= minimum:
            obs_out.append(acc_o)
            exp_out.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        if exp_out:
            obs_out[-1] += acc_o
            exp_out[-1] += acc_e
        else:
            obs_out.append(acc_o)
            exp_out.append(acc_e)
    return np.array(obs_out), np.array(exp_out)


@dataclass(frozen=True)
class DominationResult:
    holds: bool
    worst_t: int
    worst_excess: float
    slack: float

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return asdict(self)


def domination_check(samples: Sequence[int], trials: int, q: float, slack: float) -> DominationResult:
    """Does the empirical CDF of ``samples`` stay below the Bin(trials, q) CDF (+ slack)?

    Checked at every integer t in [0, max(samples)]. ``worst_t`` is the point
    where empirical CDF minus binomial CDF is largest.
    """
    data = np.asarray(samples, dtype=np.int64)
    if data.size == 0:
        raise ValidationError("samples must be nonempty")
    if slack < 0:
        raise ValidationError("slack must be nonnegative")
    top = int(data.max())
    empirical = np.cumsum(np.bincount(data, minlength=top + 1)) / data.size
    excess = np.array([empirical[t] - binomial_cdf(trials, q, t) for t in range(top + 1)])
    worst = int(np.argmax(excess))
    return DominationResult(bool(np.all(excess <= slack)), worst, float(excess[worst]), slack)
