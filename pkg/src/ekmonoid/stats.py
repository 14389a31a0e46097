"""Standardized scores for the omega family of statistics, Gaussian
distribution diagnostics, and mean-value checks.

A score for an element m of norm N >= 3 is

    (g(m)/a_k - log log N) / sqrt(log log N)

with g the weighted statistic and a_k its normalizing coefficient.  The
subset decides the admissible normalizer: exponent 1 for the full monoid
and h-free sets, exponent h for h-full sets.  Other pairings have no
Gaussian limit theorem behind them and are refused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .core import Factorization, WeightSequence
from .errors import EmptySampleError, TheoremPairingError, UnsupportedSubsetError
from .instances import MonoidInstance, prime_sieve
from .sieve import SubsetSpec, count, integers_subset_mask, scan_elements


@dataclass(frozen=True)
class ScoreSet:
    """Standardized scores over one subset at one norm bound.

    raw holds the unnormalized statistic values g(m) for the scored
    elements; excluded_small counts subset members of norm 1 or 2, which
    carry no score (log log undefined or nonpositive)."""

    instance_name: str
    subset: SubsetSpec
    stat_name: str
    a_k: float
    k_norm: int
    x: int
    scores: np.ndarray
    raw: np.ndarray
    excluded_small: int
    subset_count: int

    def __post_init__(self):
        if len(self.scores) + self.excluded_small != self.subset_count:
            raise ValueError("scores + excluded_small must equal the subset count")

    @property
    def n_samples(self) -> int:
        return len(self.scores)


@dataclass(frozen=True)
class DistributionReport:
    ks_distance: float
    n_samples: int
    moment_table: tuple[tuple[int, float, float, float], ...]  # (r, emp, gaussian, |diff|)
    raw_mean: float
    raw_variance: float
    density_weight: float  # 1 / subset count: the weight of each element

    def __post_init__(self):
        if not 0.0 <= self.ks_distance <= 1.0:
            raise ValueError("ks_distance must lie in [0, 1]")


def check_pairing(spec: SubsetSpec, weights: WeightSequence, k_norm: int,
                  derived: bool = False) -> None:
    """Refuse statistic/subset pairs outside the proven theorems.

    A zero coefficient at an explicitly requested k_norm is a plain
    invalid-normalizer error; at the subset's own designated exponent
    (derived=True) it means the statistic is mispaired with the subset.
    """
    if k_norm < 1:
        raise ValueError("k_norm must be >= 1")
    if weights.coefficient(k_norm) == 0:
        msg = (f"{weights.name} has no weight at exponent {k_norm}, the designated "
               f"normalizer for subset {spec}")
        if derived:
            raise TheoremPairingError(msg)
        raise ValueError(f"invalid normalizer: a_{k_norm} = 0 for {weights.name}")
    kind = spec.effective_kind
    if kind in ("all", "hfree") and k_norm != 1:
        raise TheoremPairingError(
            f"{weights.name} normalized at exponent {k_norm} is not paired with "
            f"subset {spec}; full-monoid and h-free scoring requires k = 1"
        )
    if kind == "hfull" and k_norm != spec.h:
        raise TheoremPairingError(
            f"{weights.name} normalized at exponent {k_norm} is not paired with "
            f"subset {spec}; h-full scoring requires k = h = {spec.h}"
        )


def default_k_norm(spec: SubsetSpec) -> int:
    return spec.h if spec.effective_kind == "hfull" else 1


def _scores_from_pairs(norms, raws, a_k):
    norms = np.asarray(norms, dtype=np.float64)
    raws = np.asarray(raws, dtype=np.float64)
    lln = np.log(np.log(norms))
    return (raws / a_k - lln) / np.sqrt(lln)


def _integers_stat_array(x: int, weights: WeightSequence) -> np.ndarray:
    """g(n) for n in 0..x via divisibility counts: with c_k(n) the number
    of primes whose k-th power divides n, g = sum_k (a_k - a_{k-1}) c_k."""
    g = np.zeros(x + 1, dtype=np.float64)
    primes = prime_sieve(x)
    k_max = max(1, int(math.log2(max(x, 2))))
    prev = 0.0
    for k in range(1, k_max + 1):
        a_k = float(weights.coefficient(k))
        delta = a_k - prev
        prev = a_k
        if delta != 0.0:
            for p in primes:
                pk = int(p) ** k
                if pk > x:
                    break
                g[pk::pk] += delta
    return g


def standardized_scores(
    instance: MonoidInstance,
    x: int,
    spec: SubsetSpec,
    weights: WeightSequence,
    k_norm: int | None = None,
) -> ScoreSet:
    """Score every subset element of norm in [3, x]; members of norm 1
    or 2 are tallied in excluded_small."""
    if x < 1:
        raise ValueError("x must be >= 1")
    derived = k_norm is None
    if derived:
        k_norm = default_k_norm(spec)
    check_pairing(spec, weights, k_norm, derived)
    a_k = float(weights.coefficient(k_norm))
    if instance.name == "integers" and spec.is_plain():
        mask = integers_subset_mask(x, spec)
        g = _integers_stat_array(x, weights)
        idx = np.nonzero(mask)[0]
        small = idx[idx < 3]
        big = idx[idx >= 3]
        raw = g[big]
        scores = _scores_from_pairs(big, raw, a_k)
        return ScoreSet(instance.name, spec, weights.name, a_k, k_norm, x,
                        scores, raw, len(small), len(idx))
    norms, raws, small, total = [], [], 0, 0
    for f in scan_elements(instance, x, spec):
        total += 1
        n = f.norm()
        if n < 3:
            small += 1
            continue
        norms.append(n)
        raws.append(float(f.omega_weighted(weights)))
    raw = np.asarray(raws, dtype=np.float64)
    scores = _scores_from_pairs(norms, raw, a_k) if norms else np.empty(0)
    return ScoreSet(instance.name, spec, weights.name, a_k, k_norm, x,
                    scores, raw, small, total)


def ks_vs_gaussian(scores: ScoreSet | np.ndarray) -> float:
    """Two-sided sup distance between the empirical CDF and Phi."""
    values = scores.scores if isinstance(scores, ScoreSet) else np.asarray(scores)
    n = len(values)
    if n == 0:
        raise EmptySampleError("no scores to compare against the Gaussian")
    s = np.sort(values)
    phi = ndtr(s)
    steps = np.arange(1, n + 1) / n
    return float(max(np.max(steps - phi), np.max(phi - (steps - 1.0 / n))))


GAUSSIAN_MOMENTS = {r: 0.0 if r % 2 else float(math.prod(range(r - 1, 0, -2)))
                    for r in range(1, 9)}


def moment_report(scores: ScoreSet, r_max: int = 4) -> DistributionReport:
    """Raw empirical moments of the scores against the Gaussian moments
    (0 for odd r, double factorial for even r)."""
    if not 1 <= r_max <= 8:
        raise ValueError("r_max must be in 1..8 (higher moments too noisy)")
    if scores.n_samples < 2:
        raise EmptySampleError("moment report needs at least 2 samples")
    rows = []
    for r in range(1, r_max + 1):
        emp = float(np.mean(scores.scores**r))
        mu = GAUSSIAN_MOMENTS[r]
        rows.append((r, emp, mu, abs(emp - mu)))
    return DistributionReport(
        ks_distance=ks_vs_gaussian(scores),
        n_samples=scores.n_samples,
        moment_table=tuple(rows),
        raw_mean=float(np.mean(scores.raw)),
        raw_variance=float(np.var(scores.raw)),
        density_weight=1.0 / scores.subset_count,
    )


def mean_omega_check(instance: MonoidInstance, x: int,
                     spec: SubsetSpec) -> tuple[float, float, float]:
    """Sum of omega over the subset against its two-term prediction.

    h-free: (kappa / zeta_M(h)) x (log log x + c1).
    h-full: kappa gamma_h x^(1/h) (log log x + d1).
    Returns (empirical_sum, predicted, relative_gap); no assertion is
    made, small x simply reports a large gap.
    """
    from .constants import c1_constant, d1_constant, gamma_h, zeta_M

    kind = spec.effective_kind
    if kind not in ("hfree", "hfull") or not spec.is_plain():
        raise UnsupportedSubsetError("mean check applies to plain h-free / h-full subsets")
    h = spec.h
    if instance.name == "integers":
        mask = integers_subset_mask(x, spec)
        c1 = np.zeros(x + 1, dtype=np.int16)
        for p in prime_sieve(x):
            p = int(p)
            c1[p::p] += 1
        empirical = float(c1[mask].sum())
    else:
        empirical = float(sum(f.omega() for f in scan_elements(instance, x, spec)))
    lln = math.log(math.log(x)) if x > 2 else 0.0
    if kind == "hfree":
        shift = c1_constant(instance, h).value
        predicted = instance.kappa / zeta_M(instance, h).value * x * (lln + shift)
    else:
        shift = d1_constant(instance, h).value
        predicted = instance.kappa * gamma_h(instance, h).value * x ** (1.0 / h) * (lln + shift)
    gap = abs(empirical - predicted) / abs(predicted) if predicted else math.inf
    return empirical, predicted, gap


def empirical_cdf_table(scores: ScoreSet, points: int = 512) -> list[tuple[float, float, float]]:
    """(t, empirical CDF, Phi(t)) rows on an evenly spaced score grid."""
    if scores.n_samples == 0:
        raise EmptySampleError("no scores")
    s = np.sort(scores.scores)
    lo, hi = float(s[0]) - 0.5, float(s[-1]) + 0.5
    ts = np.linspace(lo, hi, points)
    emp = np.searchsorted(s, ts, side="right") / len(s)
    phi = ndtr(ts)
    return [(float(t), float(e), float(p)) for t, e, p in zip(ts, emp, phi)]
