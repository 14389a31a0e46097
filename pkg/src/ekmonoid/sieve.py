"""Enumeration and counting of fully factored elements up to a norm bound.

The generic path is a depth-first recursion over the instance's prime
stream in ascending (norm, id) order, multiplying exponent ladders while
the norm stays within the bound.  h-full mode starts exponents at h, so
the recursion visits only the sparse h-full set and bounds like x = 1e10
are feasible for h = 2.  The integers instance additionally gets
closed-form and bitmask fast paths used by the large-x statistics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import Factorization, PrimeRef
from .errors import UnsupportedSubsetError
from .instances import MonoidInstance, gaussian_ideal_count_oracle, mobius_sieve, prime_sieve


@dataclass(frozen=True)
class SubsetSpec:
    """Which elements to keep: all, h-free, or h-full, with optional
    required-absent primes and required minimum exponents.

    h-full with h = 1 is the whole monoid.
    """

    kind: str = "all"  # "all" | "hfree" | "hfull"
    h: int = 1
    avoided: frozenset[PrimeRef] = frozenset()
    floors: tuple[tuple[PrimeRef, int], ...] = ()

    def __post_init__(self):
        if self.kind not in ("all", "hfree", "hfull"):
            raise ValueError(f"unknown subset kind {self.kind!r}")
        if self.kind == "hfree" and self.h < 2:
            raise ValueError("h-free requires h >= 2")
        if self.kind == "hfull" and self.h < 1:
            raise ValueError("h-full requires h >= 1")
        floor_keys = {p for p, _ in self.floors}
        if floor_keys & self.avoided:
            raise ValueError("avoided primes and floor primes must be disjoint")

    @property
    def effective_kind(self) -> str:
        """hfull with h = 1 collapses to the full monoid."""
        if self.kind == "hfull" and self.h == 1:
            return "all"
        return self.kind

    def is_plain(self) -> bool:
        return not self.avoided and not self.floors

    @staticmethod
    def parse(text: str) -> "SubsetSpec":
        """Parse `all`, `hfree:h`, or `hfull:h`."""
        if text == "all":
            return SubsetSpec()
        kind, _, h = text.partition(":")
        if kind in ("hfree", "hfull") and h.isdigit():
            return SubsetSpec(kind=kind, h=int(h))
        raise ValueError(f"cannot parse subset spec {text!r}")

    def __str__(self):
        if self.effective_kind == "all":
            return "all"
        return f"{self.kind}:{self.h}"


def _exponent_bounds(spec: SubsetSpec) -> tuple[int, int | None]:
    """(min nonzero exponent, max exponent or None) for members."""
    kind = spec.effective_kind
    if kind == "hfree":
        return 1, spec.h - 1
    if kind == "hfull":
        return spec.h, None
    return 1, None


def scan_elements(
    instance: MonoidInstance,
    x: int,
    spec: SubsetSpec = SubsetSpec(),
    norm_window: tuple[int, int] | None = None,
) -> Iterator[Factorization]:
    """Every subset element of norm <= x, once each, in DFS order.

    `norm_window=(lo, hi)` restricts the *output* to lo < norm <= hi so
    disjoint windows shard the same traversal; the union over a partition
    of (0, x] is independent of the partition.
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    lo, hi = norm_window if norm_window else (0, x)
    emin, emax = _exponent_bounds(spec)
    floor_map = dict(spec.floors)
    # only primes fitting at the minimum admissible exponent can occur
    prime_bound = x
    if emin > 1:
        prime_bound = int(round(x ** (1.0 / emin)))
        while (prime_bound + 1) ** emin <= x:
            prime_bound += 1
        while prime_bound**emin > x and prime_bound > 1:
            prime_bound -= 1
    primes = [p for p in instance.primes_up_to(max(prime_bound, 2)) if p not in spec.avoided]
    # a floor prime too large to fit at its forced exponent admits no member
    if any(p.norm ** max(emin, f) > x for p, f in floor_map.items()):
        return

    stack: list[tuple[PrimeRef, int]] = []

    def emit():
        f = Factorization(dict(stack))
        if all(f.exponent(p) >= max(emin, fl) for p, fl in floor_map.items()):
            yield f

    def walk(i: int, norm: int) -> Iterator[Factorization]:
        if lo < norm <= hi:
            yield from emit()
        for j in range(i, len(primes)):
            p = primes[j]
            base = p.norm**emin
            if norm * base > x:
                break
            fl = floor_map.get(p)
            start = max(emin, fl) if fl is not None else emin
            v = norm * p.norm**start
            if v > x:
                continue
            e = start
            while v <= x and (emax is None or e <= emax):
                stack.append((p, e))
                yield from walk(j + 1, v)
                stack.pop()
                v *= p.norm
                e += 1

    yield from walk(0, 1)


def enumerate_elements(
    instance: MonoidInstance,
    x: int,
    spec: SubsetSpec = SubsetSpec(),
    shards: int = 1,
) -> Iterator[Factorization]:
    """Subset elements of norm <= x in nondecreasing norm order within
    each shard; shards partition (0, x] into equal norm windows."""
    if shards < 1:
        raise ValueError("shards must be >= 1")
    edges = [x * k // shards for k in range(shards + 1)]
    for lo, hi in zip(edges, edges[1:]):
        if lo >= hi:
            continue
        window = sorted(
            scan_elements(instance, x, spec, norm_window=(lo, hi)),
            key=lambda f: (f.norm(), f.terms),
        )
        yield from window


# ---------------------------------------------------------------------------
# counting


def _count_dfs(instance, x, spec) -> int:
    return sum(1 for _ in scan_elements(instance, x, spec))


def _hfree_integers_count(x: int, h: int) -> int:
    """Mobius identity: #{n <= x h-free} = sum_d mu(d) floor(x / d^h)."""
    top = int(round(x ** (1.0 / h)))
    while (top + 1) ** h <= x:
        top += 1
    while top**h > x:
        top -= 1
    mu = mobius_sieve(top)
    return int(sum(int(mu[d]) * (x // d**h) for d in range(1, top + 1)))


def count(instance: MonoidInstance, x: int, spec: SubsetSpec = SubsetSpec()) -> int:
    """Exact cardinality of the subset up to norm x (identity included)."""
    if x < 1:
        raise ValueError("x must be >= 1")
    kind = spec.effective_kind
    if spec.is_plain():
        if instance.name == "integers":
            if kind == "all":
                return x
            if kind == "hfree":
                return _hfree_integers_count(x, spec.h)
        if instance.name == "gaussian" and kind == "all":
            return gaussian_ideal_count_oracle(x)
        if instance.name.startswith(("fq:", "p1:")) and kind == "all":
            q = instance.norm_lattice
            n = 0
            while q ** (n + 1) <= x:
                n += 1
            if instance.name.startswith("fq:"):
                return sum(q**d for d in range(n + 1))
            return sum((q ** (d + 1) - 1) // (q - 1) for d in range(n + 1))
    return _count_dfs(instance, x, spec)


# ---------------------------------------------------------------------------
# integers bitmask fast path (shared with stats / probmodel)


def integers_subset_mask(x: int, spec: SubsetSpec) -> np.ndarray:
    """Boolean membership mask over 0..x for the integers instance."""
    kind = spec.effective_kind
    mask = np.ones(x + 1, dtype=bool)
    mask[0] = False
    primes = prime_sieve(x)
    if kind == "hfree":
        h = spec.h
        for p in primes:
            ph = int(p) ** h
            if ph > x:
                break
            mask[ph::ph] = False
    elif kind == "hfull":
        h = spec.h
        c1 = np.zeros(x + 1, dtype=np.int16)
        ch = np.zeros(x + 1, dtype=np.int16)
        for p in primes:
            p = int(p)
            c1[p::p] += 1
            ph = p**h
            if ph <= x:
                ch[ph::ph] += 1
        mask &= c1 == ch
        mask[0] = False
    for p in spec.avoided:
        n = p.norm
        if n <= x:
            mask[n::n] = False
    for p, fl in spec.floors:
        pf = p.norm ** max(fl, _exponent_bounds(spec)[0])
        keep = np.zeros(x + 1, dtype=bool)
        if pf <= x:
            keep[pf::pf] = True
        mask &= keep
    return mask


# ---------------------------------------------------------------------------
# restricted counts and the main terms predicted for them


def _zeta_m(instance, s: float) -> float:
    from .constants import zeta_M

    return zeta_M(instance, s).value


def _gamma_h(instance, h: int) -> float:
    from .constants import gamma_h

    return gamma_h(instance, h).value


def restricted_h_free_main_term(instance, x, h, avoided) -> float:
    """Predicted count of h-free elements avoiding the given primes."""
    factor = 1.0
    for p in avoided:
        n = p.norm
        factor *= (n**h - n ** (h - 1)) / (n**h - 1)
    return factor * instance.kappa / _zeta_m(instance, h) * x


def restricted_h_full_main_term(instance, x, h, avoided) -> float:
    factor = 1.0
    for p in avoided:
        n = p.norm
        factor /= 1.0 + (1.0 / n) / (1.0 - n ** (-1.0 / h))
    return factor * instance.kappa * _gamma_h(instance, h) * x ** (1.0 / h)


def count_main_term(instance, x, spec: SubsetSpec) -> float:
    """First-order prediction for count(): kappa x for the full monoid,
    with the h-free / h-full density factors (and avoided-prime factors)
    otherwise."""
    kind = spec.effective_kind
    if kind == "all":
        factor = 1.0
        for p in spec.avoided:
            factor *= 1.0 - 1.0 / p.norm
        return factor * instance.kappa * x
    if kind == "hfree":
        return restricted_h_free_main_term(instance, x, spec.h, spec.avoided)
    return restricted_h_full_main_term(instance, x, spec.h, spec.avoided)


def _check_avoided(avoided):
    avoided = list(avoided)
    if len(set(avoided)) != len(avoided):
        raise ValueError("avoided primes must be distinct")
    return avoided


def count_restricted_h_free(instance, x, h, avoided) -> tuple[int, float]:
    """(exact count, formula main term) for h-free elements with
    n_l = 0 at every avoided prime."""
    avoided = _check_avoided(avoided)
    spec = SubsetSpec(kind="hfree", h=h, avoided=frozenset(avoided))
    if instance.name == "integers":
        exact = int(integers_subset_mask(x, spec).sum())
    else:
        exact = count(instance, x, spec)
    return exact, restricted_h_free_main_term(instance, x, h, avoided)


def count_restricted_h_full(instance, x, h, avoided) -> tuple[int, float]:
    if h < 2:
        raise ValueError("restricted h-full counting requires h >= 2")
    avoided = _check_avoided(avoided)
    spec = SubsetSpec(kind="hfull", h=h, avoided=frozenset(avoided))
    exact = count(instance, x, spec)
    return exact, restricted_h_full_main_term(instance, x, h, avoided)


# ---------------------------------------------------------------------------
# exponent-conditioned counts and the lambda / error split


def count_with_prime(instance, x, spec, p: PrimeRef, mode="at_least_one", k: int = 1) -> int:
    """Subset elements whose exponent at p is >= 1 (`at_least_one`) or
    exactly k (`exactly`)."""
    if p not in instance.primes_up_to(max(x, p.norm)):
        raise ValueError(f"prime {p.id} is not in instance {instance.name}")
    if mode not in ("at_least_one", "exactly"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exactly" and k < 1:
        raise ValueError("k must be >= 1")
    if x < p.norm:
        return 0
    if instance.name == "integers" and spec.is_plain():
        mask = integers_subset_mask(x, spec)
        n = p.norm
        if mode == "at_least_one":
            return int(mask[n::n].sum())
        nk = n**k
        lower = int(mask[nk::nk].sum()) if nk <= x else 0
        nk1 = nk * n
        upper = int(mask[nk1::nk1].sum()) if nk1 <= x else 0
        return lower - upper
    total = 0
    for f in scan_elements(instance, x, spec):
        e = f.exponent(p)
        if (mode == "at_least_one" and e >= 1) or (mode == "exactly" and e == k):
            total += 1
    return total


def lambda_closed_form(spec: SubsetSpec, p: PrimeRef, flavor: str = "identity") -> float:
    """Limit density of subset elements meeting the exponent condition at p.

    flavor `identity`: exponent >= 1.  flavor `exact`: exponent equal to
    the subset's minimum admissible value (1 for the full monoid and for
    h-free sets, h for h-full sets).
    """
    n = p.norm
    kind = spec.effective_kind
    h = spec.h
    if flavor == "identity":
        if kind == "all":
            return 1.0 / n
        if kind == "hfree":
            return (n ** (h - 1) - 1) / (n**h - 1)
        return 1.0 / (n * (1.0 - n ** (-1.0 / h) + 1.0 / n))
    if flavor == "exact":
        if kind == "all":
            return (1.0 / n) * (1.0 - 1.0 / n)
        if kind == "hfree":
            return (n**h - n ** (h - 1)) / ((n**h - 1) * n)
        return (1.0 - n ** (-1.0 / h)) / (n * (1.0 - n ** (-1.0 / h) + 1.0 / n))
    raise ValueError(f"unknown flavor {flavor!r}")


def lambda_e_decomposition(
    instance, x, spec: SubsetSpec, p: PrimeRef, flavor: str = "identity"
) -> tuple[float, float]:
    """(main-term density, finite-x error) of the exponent condition at p."""
    if spec.effective_kind not in ("all", "hfree", "hfull") or not spec.is_plain():
        raise UnsupportedSubsetError("closed-form density known only for plain all/hfree/hfull")
    lam = lambda_closed_form(spec, p, flavor)
    if flavor == "identity":
        hit = count_with_prime(instance, x, spec, p, "at_least_one")
    else:
        k = spec.h if spec.effective_kind == "hfull" else 1
        hit = count_with_prime(instance, x, spec, p, "exactly", k)
    measured = hit / count(instance, x, spec)
    return lam, measured - lam


def star_residuals(instance, ladder) -> list[tuple[int, float]]:
    """(x, count - kappa * x) over a ladder; the linear-density check."""
    return [(x, count(instance, x) - instance.kappa * x) for x in ladder]
