"""Deterministic statistics engine: agreement coefficients, interval
estimates, paired comparisons, and a paper-level cluster bootstrap.

All randomness flows through numpy's PCG64 generator seeded explicitly, so
every bootstrap output is reproducible bit-for-bit across platforms and
runs. Use ``derive_seed`` to fan a single master seed out to subsystems.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence, TypeVar

import numpy as np
from scipy import stats as sps

from .errors import (
    AllZeroDiffs,
    DegenerateMarginals,
    EmptyClusters,
    EmptyGroup,
    EmptyInput,
    SingleCategoryVocabulary,
    ZeroVariance,
)

T = TypeVar("T")

# Wilcoxon p-values switch from exact enumeration to the tie-corrected
# normal approximation above this many nonzero differences.
WILCOXON_EXACT_LIMIT = 25


@dataclass(frozen=True)
class IntervalEstimate:
    """A point estimate with a confidence interval."""

    point: float
    lower: float
    upper: float
    level: float
    method: str  # "wilson" | "percentile_bootstrap"

    def __post_init__(self) -> None:
        if not 0.0 < self.level < 1.0:
            raise ValueError("confidence level must be in (0, 1)")
        if not self.lower <= self.point <= self.upper:
            raise ValueError(
                f"interval [{self.lower}, {self.upper}] does not contain "
                f"point {self.point}"
            )


@dataclass(frozen=True)
class BootstrapConfig:
    """Resampling configuration. Defaults: 10,000 iterations at 95%."""

    iterations: int = 10_000
    seed: int = 0
    level: float = 0.95

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 < self.level < 1.0:
            raise ValueError("confidence level must be in (0, 1)")


def derive_seed(master: int, label: str) -> int:
    """Deterministically derive a 63-bit subsystem seed from (master, label).

    Labeled derivation keeps independent subsystems on independent streams
    while everything remains a pure function of one CLI-level seed.
    """
    digest = hashlib.sha256(f"{label}|{master}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


# ---------------------------------------------------------------------------
# Agreement coefficients
# ---------------------------------------------------------------------------

def percent_agreement(pairs: Sequence[tuple[Hashable, Hashable]]) -> float:
    """Fraction of label pairs where both raters chose the same label."""
    if not pairs:
        raise EmptyInput("percent_agreement needs at least one pair")
    return sum(a == b for a, b in pairs) / len(pairs)


def cohen_kappa(pairs: Sequence[tuple[Hashable, Hashable]]) -> float:
    """Cohen's kappa: (p_a - p_e) / (1 - p_e), with chance agreement p_e
    from the product of the two raters' marginal label proportions."""
    if not pairs:
        raise EmptyInput("cohen_kappa needs at least one pair")
    n = len(pairs)
    marginals_1 = Counter(a for a, _ in pairs)
    marginals_2 = Counter(b for _, b in pairs)
    p_a = percent_agreement(pairs)
    p_e = sum(
        (marginals_1[label] / n) * (marginals_2[label] / n)
        for label in set(marginals_1) | set(marginals_2)
    )
    if p_e >= 1.0 - 1e-15:
        raise DegenerateMarginals(
            "both raters are constant on the same label; kappa is undefined"
        )
    return (p_a - p_e) / (1.0 - p_e)


def gwet_ac1(
    pairs: Sequence[tuple[Hashable, Hashable]],
    vocabulary: Iterable[Hashable] | None = None,
) -> float:
    """Gwet's AC1: (p_a - p_e) / (1 - p_e) with
    p_e = (1/(K-1)) * sum_k pi_k (1 - pi_k), where pi_k averages the two
    raters' marginal proportions for category k.

    AC1 stays high under skewed marginals where kappa collapses (the kappa
    paradox). ``vocabulary`` defaults to the labels observed in the data;
    pass the full label set explicitly when some categories may be absent.
    """
    if not pairs:
        raise EmptyInput("gwet_ac1 needs at least one pair")
    n = len(pairs)
    categories = (
        sorted(set(vocabulary), key=repr)
        if vocabulary is not None
        else sorted({a for a, _ in pairs} | {b for _, b in pairs}, key=repr)
    )
    k = len(categories)
    if k < 2:
        raise SingleCategoryVocabulary("AC1 needs at least two categories")
    marginals_1 = Counter(a for a, _ in pairs)
    marginals_2 = Counter(b for _, b in pairs)
    p_a = percent_agreement(pairs)
    p_e = sum(
        pi * (1.0 - pi)
        for pi in (
            (marginals_1[c] + marginals_2[c]) / (2.0 * n) for c in categories
        )
    ) / (k - 1)
    return (p_a - p_e) / (1.0 - p_e)


# ---------------------------------------------------------------------------
# Interval estimates
# ---------------------------------------------------------------------------

# The 95% normal quantile is pinned to this literal so Wilson endpoints are
# bit-stable across scipy versions and platforms.
Z_95 = 1.959964


def z_quantile(level: float) -> float:
    if abs(level - 0.95) < 1e-12:
        return Z_95
    return float(sps.norm.ppf(0.5 + level / 2.0))


def wilson_ci(successes: int, trials: int, level: float = 0.95) -> IntervalEstimate:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise EmptyInput("wilson_ci needs at least one trial")
    if not 0 <= successes <= trials:
        raise ValueError("successes must be within [0, trials]")
    z = z_quantile(level)
    p = successes / trials
    z2n = z * z / trials
    center = (p + z2n / 2.0) / (1.0 + z2n)
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / (1.0 + z2n)
    # Clamp into [0, 1] and onto the point: the exact endpoints at p = 0 and
    # p = 1 are 0 and 1, but floating point can land a hair inside.
    return IntervalEstimate(
        point=p,
        lower=min(max(0.0, center - half), p),
        upper=max(min(1.0, center + half), p),
        level=level,
        method="wilson",
    )


# ---------------------------------------------------------------------------
# Paired comparisons
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairedTResult:
    mean_diff: float
    cohen_d: float
    p_value: float


def paired_t(diffs: Sequence[float]) -> PairedTResult:
    """Two-sided paired t-test on a vector of per-paper differences.

    Cohen's d for the paired design is mean(diffs) / sd(diffs) with the
    sample (n-1) standard deviation.
    """
    if len(diffs) < 2:
        raise EmptyInput("paired_t needs at least two observations")
    arr = np.asarray(diffs, dtype=float)
    sd = float(arr.std(ddof=1))
    if sd == 0.0:
        raise ZeroVariance("all differences identical")
    mean = float(arr.mean())
    t_stat = mean / (sd / math.sqrt(len(arr)))
    p = 2.0 * float(sps.t.sf(abs(t_stat), df=len(arr) - 1))
    return PairedTResult(mean_diff=mean, cohen_d=mean / sd, p_value=p)


@dataclass(frozen=True)
class WilcoxonResult:
    rank_biserial: float
    p_value: float


def _wilcoxon_exact_p(ranks: np.ndarray, w_plus: float) -> float:
    """Exact two-sided p for the signed-rank statistic.

    Enumerates the null distribution of W+ by dynamic programming over the
    (tie-averaged) ranks, doubled so that half-ranks become integers.
    """
    doubled = np.rint(ranks * 2).astype(int)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=float)
    counts[0] = 1.0
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    counts /= counts.sum()
    w2 = int(round(w_plus * 2))
    lower_tail = counts[: w2 + 1].sum()
    upper_tail = counts[w2:].sum()
    return float(min(1.0, 2.0 * min(lower_tail, upper_tail)))


def wilcoxon_signed_rank(diffs: Sequence[float]) -> WilcoxonResult:
    """Wilcoxon signed-rank test with the rank-biserial effect size.

    Zeros are dropped before ranking (standard signed-rank convention).
    Ties take average ranks. r = (W+ - W-) / (W+ + W-). The p-value uses
    exact enumeration up to 25 nonzero differences and the tie-corrected
    normal approximation beyond that.
    """
    arr = np.asarray([d for d in diffs if d != 0.0], dtype=float)
    if arr.size == 0:
        raise AllZeroDiffs("no nonzero differences to rank")
    ranks = sps.rankdata(np.abs(arr))
    w_plus = float(ranks[arr > 0].sum())
    w_minus = float(ranks[arr < 0].sum())
    r = (w_plus - w_minus) / (w_plus + w_minus)
    n = arr.size
    if n <= WILCOXON_EXACT_LIMIT:
        p = _wilcoxon_exact_p(ranks, w_plus)
    else:
        mean = n * (n + 1) / 4.0
        variance = n * (n + 1) * (2 * n + 1) / 24.0
        _, tie_counts = np.unique(np.abs(arr), return_counts=True)
        variance -= float(((tie_counts**3 - tie_counts) / 48.0).sum())
        z = (w_plus - mean) / math.sqrt(variance)
        p = 2.0 * float(sps.norm.sf(abs(z)))
    return WilcoxonResult(rank_biserial=r, p_value=min(1.0, p))


# ---------------------------------------------------------------------------
# Cluster bootstrap
# ---------------------------------------------------------------------------

def cluster_bootstrap_ci(
    clusters: Sequence[T],
    statistic: Callable[[list[T]], float],
    cfg: BootstrapConfig,
) -> IntervalEstimate:
    """Percentile bootstrap over whole clusters (papers) sampled with
    replacement.

    ``statistic`` receives the resampled cluster multiset as a list. The
    point estimate is the statistic of the original clusters. Deterministic
    given ``cfg.seed``; in the degenerate single-cluster case the interval
    collapses onto the point.
    """
    clusters = list(clusters)
    if not clusters:
        raise EmptyClusters("cluster bootstrap needs at least one cluster")
    point = float(statistic(clusters))
    n = len(clusters)
    rng = np.random.default_rng(cfg.seed)
    index_matrix = rng.integers(0, n, size=(cfg.iterations, n))
    draws = np.empty(cfg.iterations, dtype=float)
    for b in range(cfg.iterations):
        draws[b] = statistic([clusters[j] for j in index_matrix[b].tolist()])
    alpha = (1.0 - cfg.level) / 2.0
    lower, upper = np.percentile(draws, [100.0 * alpha, 100.0 * (1.0 - alpha)])
    # The percentile interval can miss the point estimate only in degenerate
    # clipped settings; widen minimally so the invariant always holds.
    return IntervalEstimate(
        point=point,
        lower=min(float(lower), point),
        upper=max(float(upper), point),
        level=cfg.level,
        method="percentile_bootstrap",
    )


def per_paper_rates(
    groups: Mapping[str, Sequence[T]],
    predicate: Callable[[T], bool],
) -> list[tuple[str, float]]:
    """One proportion per paper, sorted by paper id.

    Papers are weighted equally downstream, which is why the per-paper mean
    of these rates differs from the pooled item-level rate whenever papers
    contribute different item counts.
    """
    rates = []
    for paper_id in sorted(groups):
        records = groups[paper_id]
        if not records:
            raise EmptyGroup(f"paper {paper_id} has no records")
        rates.append((paper_id, sum(predicate(r) for r in records) / len(records)))
    return rates
