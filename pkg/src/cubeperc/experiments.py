"""Trial predicates and the aggregate experiments built from them.

Every trial is a function of one :class:`RngStream`; the harness in
:mod:`cubeperc.stats` supplies the stream for each trial index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import census, hitting
from .bounds import binomial_pmf
from .cube import CubeSpec, icbrt
from .rng import RngStream
from .sampler import bernoulli_subgraph, two_round_union
from .stats import (
    MCEstimate,
    chi2_critical,
    chi_square_statistic,
    mc_estimate,
    mc_map,
    merge_small_bins,
)


def label_for(command: str, spec: CubeSpec, p: float | None = None) -> str:
    """Stream label; distinct parameter points get distinct streams."""
    return f"{command}:d={spec.d}" if p is None else f"{command}:d={spec.d}:p={p!r}"


def _connected(spec: CubeSpec, p: float, rng: RngStream) -> bool:
    return census.is_connected(bernoulli_subgraph(spec, p, rng))


def connectivity_trial(spec: CubeSpec, p: float):
    return partial(_connected, spec, p)


def hitting_trial(spec: CubeSpec):
    return partial(hitting.hitting_equality_trial, spec)


def _verdict(spec: CubeSpec, p: float, threshold: float, rng: RngStream) -> census.PropositionVerdict:
    sample = bernoulli_subgraph(spec, p, rng)
    return census.proposition_verdict(census.components(spec, sample), threshold)


def verdict_trial(spec: CubeSpec, p: float, threshold: float):
    return partial(_verdict, spec, p, threshold)


def _isolated(spec: CubeSpec, p: float, rng: RngStream) -> int:
    return census.isolated_count(bernoulli_subgraph(spec, p, rng))


def isolated_count_trial(spec: CubeSpec, p: float):
    return partial(_isolated, spec, p)


def _bounded_events(spec: CubeSpec, p: float, rng: RngStream) -> tuple[bool, bool]:
    # (two adjacent isolated vertices, a component of order in [2, floor(n^(1/3))])
    sample = bernoulli_subgraph(spec, p, rng)
    c = census.components(spec, sample)
    adjacent = c.min_isolated_hamming == 1
    small = c.count_sizes_between(2, icbrt(spec.n)) > 0
    return adjacent, small


def bounded_events_trial(spec: CubeSpec, p: float):
    return partial(_bounded_events, spec, p)


def estimate_connectivity(spec, p, trials, seed, workers=1, z=1.96) -> MCEstimate:
    return mc_estimate(connectivity_trial(spec, p), trials, seed, label_for("connectivity", spec, p), workers, z)


def estimate_hitting(spec, trials, seed, workers=1, z=1.96) -> MCEstimate:
    return mc_estimate(hitting_trial(spec), trials, seed, label_for("hitting", spec), workers, z)


@dataclass(frozen=True)
class CensusSummary:
    verdict: MCEstimate
    mean_giant_fraction: float
    min_giant_fraction: float
    others_all_isolated_rate: float
    isolated_pairwise_far_rate: float
    threshold: float

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.to_dict(),
            "mean_giant_fraction": self.mean_giant_fraction,
            "min_giant_fraction": self.min_giant_fraction,
            "others_all_isolated_rate": self.others_all_isolated_rate,
            "isolated_pairwise_far_rate": self.isolated_pairwise_far_rate,
            "threshold": self.threshold,
        }


def census_experiment(spec, p, threshold, trials, seed, workers=1, z=1.96) -> CensusSummary:
    label = label_for("census", spec, p)
    verdicts = mc_map(verdict_trial(spec, p, threshold), trials, seed, label, workers)
    fractions = [v.giant_fraction for v in verdicts]
    return CensusSummary(
        verdict=MCEstimate.from_counts(sum(v.holds for v in verdicts), trials, seed, label, z),
        mean_giant_fraction=math.fsum(fractions) / trials,
        min_giant_fraction=min(fractions),
        others_all_isolated_rate=sum(v.others_all_isolated for v in verdicts) / trials,
        isolated_pairwise_far_rate=sum(v.isolated_pairwise_far for v in verdicts) / trials,
        threshold=threshold,
    )


@dataclass(frozen=True)
class TwoRoundReport:
    d: int
    p: float
    eps: float
    trials: int
    edge_frequencies: tuple[float, ...]
    max_edge_deviation: float
    tolerance: float
    chi2: float
    df: int
    chi2_critical: float
    master_seed: int
    label: str

    @property
    def marginals_ok(self) -> bool:
        return self.max_edge_deviation <= self.tolerance

    @property
    def chi2_ok(self) -> bool:
        return self.chi2 < self.chi2_critical

    @property
    def passed(self) -> bool:
        return self.marginals_ok and self.chi2_ok

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "p": self.p,
            "eps": self.eps,
            "trials": self.trials,
            "edge_frequencies": list(self.edge_frequencies),
            "max_edge_deviation": self.max_edge_deviation,
            "tolerance": self.tolerance,
            "marginals_ok": self.marginals_ok,
            "chi2": self.chi2,
            "df": self.df,
            "chi2_critical": self.chi2_critical,
            "alpha": 0.001,
            "chi2_ok": self.chi2_ok,
            "passed": self.passed,
            "provenance": {"seed": self.master_seed, "label": self.label},
        }


def _union_edges(spec: CubeSpec, p: float, eps: float, rng: RngStream) -> np.ndarray:
    return two_round_union(spec, p, eps, rng)[2].edges


def tworound_experiment(spec, p, eps, trials, seed, workers=1, tolerance=0.005) -> TwoRoundReport:
    """Per-edge inclusion frequency of the two-round union, and a chi-square test
    of its edge count against Binomial(m, p)."""
    label = label_for("tworound", spec, p)
    unions = np.array(mc_map(partial(_union_edges, spec, p, eps), trials, seed, label, workers))
    freqs = unions.sum(axis=0) / trials
    histogram = np.bincount(unions.sum(axis=1), minlength=spec.m + 1)
    obs, exp = merge_small_bins(histogram, binomial_pmf(spec.m, p) * trials)
    df = len(obs) - 1
    return TwoRoundReport(
        d=spec.d,
        p=p,
        eps=eps,
        trials=trials,
        edge_frequencies=tuple(float(f) for f in freqs),
        max_edge_deviation=float(np.max(np.abs(freqs - p))),
        tolerance=tolerance,
        chi2=chi_square_statistic(obs, exp) if df >= 1 else 0.0,
        df=df,
        chi2_critical=chi2_critical(df, 0.001) if df >= 1 else math.inf,
        master_seed=seed,
        label=label,
    )
