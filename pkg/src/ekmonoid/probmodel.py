"""Independent Bernoulli model for the truncated prime-divisor count.

The model attaches to each prime of norm at most y an independent
indicator with success probability lambda (the limiting density of
subset elements divisible by that prime), and compares the exact
distribution of their sum with the truncated statistic omega_y over the
enumerated subset.  It also evaluates finite-x diagnostics for the
asymptotic conditions of the general limit theorem: each condition's
normalized ratio is computed at sqrt(x) and at x, and flagged PASS when
it decreases.  That is a two-point trend proxy for an o(.) statement,
not a proof, and reports label it as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PrimeRef
from .errors import UnsupportedSubsetError
from .instances import MonoidInstance, prime_sieve
from .sieve import (
    SubsetSpec,
    count,
    integers_subset_mask,
    lambda_closed_form,
    scan_elements,
)

MAX_TABLE = 10**6
CONDITION_F_Y_CAP = 10**3


def default_y(x: int, beta: float = 1.0) -> int:
    """Truncation norm floor(x^(beta / log log x)), clamped to >= 2."""
    if x < 16:
        raise ValueError("x must be >= 16 (log log x must exceed 1)")
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    y = int(x ** (beta / math.log(math.log(x))))
    return max(y, 2)


@dataclass(frozen=True)
class BernoulliSystem:
    """Independent indicators X_l for all primes of norm <= y; the model
    sum S_y approximates omega_y over the subset at bound x."""

    entries: tuple[tuple[PrimeRef, float], ...]
    y: int
    x: int
    beta: float

    def __post_init__(self):
        for p, lam in self.entries:
            if not 0.0 <= lam <= 1.0:
                raise ValueError(f"lambda for {p.id} must be in [0, 1], got {lam}")
            if p.norm > self.y:
                raise ValueError(f"prime {p.id} exceeds the truncation norm {self.y}")
        if not self.y < self.x**self.beta:
            raise ValueError("y must be < x^beta")

    @property
    def mean(self) -> float:
        return float(sum(lam for _, lam in self.entries))

    @property
    def variance(self) -> float:
        return float(sum(lam * (1.0 - lam) for _, lam in self.entries))


def build_bernoulli_system(
    instance: MonoidInstance,
    x: int,
    spec: SubsetSpec,
    beta: float = 1.0,
    y: int | None = None,
    flavor: str = "identity",
) -> BernoulliSystem:
    if not spec.is_plain():
        raise UnsupportedSubsetError("closed-form lambda requires a plain subset")
    if y is None:
        y = default_y(x, beta)
    entries = tuple(
        (p, lambda_closed_form(spec, p, flavor)) for p in instance.primes_up_to(y)
    )
    return BernoulliSystem(entries, y, x, beta)


def exact_bernoulli_distribution(sys: BernoulliSystem) -> np.ndarray:
    """Exact pmf of S_y on {0, ..., number of entries} by convolution."""
    if len(sys.entries) > MAX_TABLE:
        raise ValueError(f"system too large for an exact table ({len(sys.entries)} entries)")
    lams = sorted((lam for _, lam in sys.entries), reverse=True)
    pmf = np.array([1.0])
    for lam in lams:
        nxt = np.empty(len(pmf) + 1)
        nxt[:-1] = pmf * (1.0 - lam)
        nxt[-1] = 0.0
        nxt[1:] += pmf * lam
        pmf = nxt
    return pmf


def _model_standardized_moments(sys: BernoulliSystem, r_max: int) -> list[float]:
    pmf = exact_bernoulli_distribution(sys)
    mean, var = sys.mean, sys.variance
    if var == 0.0:
        raise ValueError("model variance is zero")
    z = (np.arange(len(pmf)) - mean) / math.sqrt(var)
    return [float(np.sum(pmf * z**r)) for r in range(1, r_max + 1)]


def _truncated_omega_values(instance, x, spec, y) -> np.ndarray:
    """omega_y over every subset element of norm <= x."""
    if instance.name == "integers" and spec.is_plain():
        cy = np.zeros(x + 1, dtype=np.int16)
        for p in prime_sieve(min(y, x)):
            p = int(p)
            cy[p::p] += 1
        mask = integers_subset_mask(x, spec)
        return cy[mask].astype(np.float64)
    vals = []
    for f in scan_elements(instance, x, spec):
        vals.append(sum(1 for p, _ in f.terms if p.norm <= y))
    return np.asarray(vals, dtype=np.float64)


def model_vs_truncated(
    instance: MonoidInstance,
    x: int,
    spec: SubsetSpec,
    y: int | None = None,
    r_max: int = 4,
    beta: float = 1.0,
) -> list[tuple[int, float, float, float]]:
    """Rows (r, empirical moment of standardized omega_y over the subset,
    model moment of standardized S_y, absolute gap), r = 1..r_max.

    Both sides are centered and scaled by the model mean and variance.
    """
    if not 1 <= r_max <= 4:
        raise ValueError("r_max must be in 1..4")
    sys = build_bernoulli_system(instance, x, spec, beta, y)
    model = _model_standardized_moments(sys, r_max)
    omega_y = _truncated_omega_values(instance, x, spec, sys.y)
    z = (omega_y - sys.mean) / math.sqrt(sys.variance)
    rows = []
    for r in range(1, r_max + 1):
        emp = float(np.mean(z**r))
        rows.append((r, emp, model[r - 1], abs(emp - model[r - 1])))
    return rows


# ---------------------------------------------------------------------------
# condition diagnostics


def _lambda_vector(spec: SubsetSpec, norms: np.ndarray, flavor="identity") -> np.ndarray:
    """Vectorized closed-form lambda over an array of prime norms."""
    n = norms.astype(np.float64)
    kind = spec.effective_kind
    h = spec.h
    if flavor != "identity":
        raise ValueError("condition diagnostics use the divisibility lambda only")
    if kind == "all":
        return 1.0 / n
    if kind == "hfree":
        return (n ** (h - 1) - 1.0) / (n**h - 1.0)
    return 1.0 / (n * (1.0 - n ** (-1.0 / h) + 1.0 / n))


def _measured_divisor_density(instance, x, spec, primes) -> dict[PrimeRef, float]:
    """Fraction of subset elements divisible by each given prime."""
    total = count(instance, x, spec)
    out = {}
    if instance.name == "integers" and spec.is_plain():
        mask = integers_subset_mask(x, spec)
        for p in primes:
            n = p.norm
            out[p] = float(mask[n::n].sum()) / total if n <= x else 0.0
        return out
    hits = {p: 0 for p in primes}
    wanted = {p for p in primes}
    for f in scan_elements(instance, x, spec):
        for p, _ in f.terms:
            if p in wanted:
                hits[p] += 1
    return {p: hits[p] / total for p in primes}


@dataclass(frozen=True)
class ConditionReport:
    name: str
    value_at_sqrt_x: float
    value_at_x: float
    normalizer_at_sqrt_x: float
    normalizer_at_x: float
    passed: bool  # ratio decreased from sqrt(x) to x (trend proxy, not a proof)

    @property
    def ratio_at_sqrt_x(self) -> float:
        return self.value_at_sqrt_x / self.normalizer_at_sqrt_x

    @property
    def ratio_at_x(self) -> float:
        return self.value_at_x / self.normalizer_at_x


def _condition_values(instance, x, spec, beta, y):
    """Raw sums for conditions (b) through (e) at a single x."""
    lln = math.log(math.log(x))
    xb = int(x**beta)
    norms = np.array([p.norm for p in instance.primes_up_to(xb)], dtype=np.int64)
    lam = _lambda_vector(spec, norms)
    mid = (norms > y) & (norms <= xb)
    low = norms <= y
    b_sum = float(lam[mid].sum())
    d_sum = abs(float(lam[low].sum()) - lln)
    e_sum = float((lam[low] ** 2).sum())
    mid_primes = [p for p in instance.primes_up_to(xb) if y < p.norm <= xb]
    measured = _measured_divisor_density(instance, x, spec, mid_primes)
    lam_by_norm = dict(zip(norms.tolist(), lam.tolist()))
    c_sum = float(sum(abs(measured[p] - lam_by_norm[p.norm]) for p in mid_primes))
    return {"b": b_sum, "c": c_sum, "d": d_sum, "e": e_sum}


def _pair_error_sum(instance, x, spec, y) -> float:
    """Condition (f) at u = 2: sum over distinct prime pairs of norm <= y
    of |measured joint divisibility density - lambda_1 lambda_2|."""
    y = min(y, CONDITION_F_Y_CAP)
    primes = instance.primes_up_to(y)
    total = count(instance, x, spec)
    if instance.name == "integers" and spec.is_plain():
        mask = integers_subset_mask(x, spec)
        s = 0.0
        for i, p in enumerate(primes):
            lp = lambda_closed_form(spec, p)
            for q in primes[i + 1 :]:
                nm = p.norm * q.norm
                if nm > x:
                    joint = 0.0
                else:
                    joint = float(mask[nm::nm].sum()) / total
                s += abs(joint - lp * lambda_closed_form(spec, q))
        return s
    pair_hits: dict[tuple[PrimeRef, PrimeRef], int] = {}
    for f in scan_elements(instance, x, spec):
        present = sorted((p for p, _ in f.terms if p.norm <= y))
        for i, p in enumerate(present):
            for q in present[i + 1 :]:
                pair_hits[(p, q)] = pair_hits.get((p, q), 0) + 1
    s = 0.0
    for i, p in enumerate(primes):
        lp = lambda_closed_form(spec, p)
        for q in primes[i + 1 :]:
            joint = pair_hits.get((p, q), 0) / total
            s += abs(joint - lp * lambda_closed_form(spec, q))
    return s


def condition_check(
    instance: MonoidInstance,
    x: int,
    spec: SubsetSpec,
    beta: float = 1.0,
    y: int | None = None,
    include_f: bool = False,
    r_for_f: int = 2,
) -> list[ConditionReport]:
    """Finite-x diagnostics for conditions (b) through (e), optionally (f)
    at pair order, each evaluated at sqrt(x) and x with its normalizer."""
    if not spec.is_plain():
        raise UnsupportedSubsetError("condition diagnostics require a plain subset")
    if x < 256:
        raise ValueError("x must be >= 256 so that sqrt(x) >= 16")
    xs = int(math.isqrt(x))
    reports = []
    points = []
    for xv in (xs, x):
        yv = default_y(xv, beta) if y is None else min(y, max(2, int(xv**beta) - 1))
        points.append((xv, yv, _condition_values(instance, xv, spec, beta, yv)))
    for name in ("b", "c", "d", "e"):
        (x1, _, v1), (x2, _, v2) = points
        n1 = math.sqrt(math.log(math.log(x1)))
        n2 = math.sqrt(math.log(math.log(x2)))
        reports.append(
            ConditionReport(name, v1[name], v2[name], n1, n2,
                            v2[name] / n2 < v1[name] / n1)
        )
    if include_f:
        (x1, y1, _), (x2, y2, _) = points
        f1 = _pair_error_sum(instance, x1, spec, y1)
        f2 = _pair_error_sum(instance, x2, spec, y2)
        n1 = math.log(math.log(x1)) ** (-r_for_f / 2.0)
        n2 = math.log(math.log(x2)) ** (-r_for_f / 2.0)
        reports.append(ConditionReport("f", f1, f2, n1, n2, f2 / n2 < f1 / n1))
    return reports


def condition_a_audit(
    instance: MonoidInstance,
    x: int,
    spec: SubsetSpec,
    beta: float,
    sample: int = 10**5,
) -> int:
    """Maximum number of distinct prime factors of norm > x^beta over a
    deterministic sample of subset elements; bounded by ceil(1/beta)."""
    if sample < 1:
        raise ValueError("sample must be >= 1")
    threshold = x**beta
    if instance.name == "integers" and spec.is_plain():
        mask = integers_subset_mask(x, spec)
        big = np.zeros(x + 1, dtype=np.int8)
        for p in prime_sieve(x):
            p = int(p)
            if p > threshold:
                big[p::p] += 1
        members = np.nonzero(mask)[0][:sample]
        return int(big[members].max()) if len(members) else 0
    best = 0
    for i, f in enumerate(scan_elements(instance, x, spec)):
        if i >= sample:
            break
        best = max(best, sum(1 for p, _ in f.terms if p.norm > threshold))
    return best


def truncation_residual(instance: MonoidInstance, x: int, spec: SubsetSpec,
                        y: int | None = None, beta: float = 1.0) -> float:
    """(sum over the subset of omega - omega_y) / (count sqrt(log log x));
    should shrink as x grows with the default truncation."""
    if y is None:
        y = default_y(x, beta)
    if instance.name == "integers" and spec.is_plain():
        mask = integers_subset_mask(x, spec)
        tail = np.zeros(x + 1, dtype=np.int16)
        for p in prime_sieve(x):
            p = int(p)
            if p > y:
                tail[p::p] += 1
        total_gap = float(tail[mask].sum())
        n = int(mask.sum())
    else:
        total_gap, n = 0.0, 0
        for f in scan_elements(instance, x, spec):
            n += 1
            total_gap += sum(1 for p, _ in f.terms if p.norm > y)
    return total_gap / (n * math.sqrt(math.log(math.log(x))))
