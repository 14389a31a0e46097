"""Concrete normed monoids: rational integers, Gaussian-integer ideals,
monic polynomials over F_q, and the projective-line variant with the
extra degree-one prime at infinity.

Each instance exposes a deterministic stream of PrimeRefs in
nondecreasing (norm, id) order together with its density constant kappa
and error exponent theta for the count of elements of norm <= x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import PrimeRef

ALL_RATIONALS = 0  # norm lattice marker: norms may be any positive integer


def prime_sieve(limit: int) -> np.ndarray:
    """All rational primes <= limit, ascending."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if mask[i]:
            mask[i * i :: i] = False
    return np.nonzero(mask)[0].astype(np.int64)


def mobius_sieve(limit: int) -> np.ndarray:
    """mu(0..limit) by a linear sieve."""
    mu = np.ones(limit + 1, dtype=np.int8)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for i in range(2, limit + 1):
        if mask[i]:
            mu[i::i] *= -1
            sq = i * i
            if sq <= limit:
                mu[sq::sq] = 0
            for j in range(i * i, limit + 1, i):
                mask[j] = False
    mu[0] = 0
    return mu


@dataclass
class MonoidInstance:
    """A pluggable prime system satisfying the linear-density condition.

    `generator(bound)` must return every PrimeRef of norm <= bound, and be
    deterministic: repeated calls (with any bounds) agree on their common
    prefix.
    """

    name: str
    kappa: float
    theta: float
    generator: Callable[[int], list[PrimeRef]]
    norm_lattice: int = ALL_RATIONALS  # 0 = all integers, q >= 2 = powers of q
    _cache_bound: int = field(default=-1, repr=False)
    _cache: list[PrimeRef] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be > 0")
        if not 0 <= self.theta < 1:
            raise ValueError("theta must be in [0, 1)")

    def primes_up_to(self, bound: int) -> list[PrimeRef]:
        """Primes of norm <= bound, sorted by (norm, id)."""
        if bound > self._cache_bound:
            primes = sorted(self.generator(bound), key=lambda p: (p.norm, p.id))
            self._cache = primes
            self._cache_bound = bound
        if bound == self._cache_bound:
            return list(self._cache)
        out = []
        for p in self._cache:
            if p.norm > bound:
                break
            out.append(p)
        return out

    def prime_lookup(self, bound: int) -> dict[str, PrimeRef]:
        return {p.id: p for p in self.primes_up_to(bound)}


# ---------------------------------------------------------------------------
# rational integers


def integers_instance(limit: int = 2) -> MonoidInstance:
    """Positive integers under multiplication; norm is the integer itself."""
    if limit < 2:
        raise ValueError("limit must be >= 2")

    def gen(bound: int) -> list[PrimeRef]:
        return [PrimeRef(int(p), str(int(p))) for p in prime_sieve(bound)]

    inst = MonoidInstance("integers", kappa=1.0, theta=0.0, generator=gen)
    inst.primes_up_to(limit)
    return inst


# ---------------------------------------------------------------------------
# Gaussian integers


def gaussian_instance(limit: int = 2) -> MonoidInstance:
    """Nonzero ideals of Z[i]; primes come from splitting rational primes.

    p = 2 ramifies (one prime of norm 2), p = 1 mod 4 splits (two primes
    of norm p), p = 3 mod 4 stays inert (one prime of norm p^2).  Density
    of ideals is pi/4 with Landau's error exponent 1/3.
    """
    if limit < 2:
        raise ValueError("limit must be >= 2")

    def gen(bound: int) -> list[PrimeRef]:
        out = []
        for p in prime_sieve(bound):
            p = int(p)
            if p == 2:
                out.append(PrimeRef(2, "2"))
            elif p % 4 == 1:
                out.append(PrimeRef(p, f"{p}.0"))
                out.append(PrimeRef(p, f"{p}.1"))
            elif p * p <= bound:
                out.append(PrimeRef(p * p, str(p)))
        return out

    inst = MonoidInstance("gaussian", kappa=math.pi / 4, theta=1.0 / 3.0, generator=gen)
    inst.primes_up_to(limit)
    return inst


def gaussian_ideal_count_oracle(x: int) -> int:
    """Exact number of ideals of Z[i] with norm in [1, x].

    Counts via the divisor convolution of the nontrivial character mod 4:
    the number of ideals of norm n is sum over d | n of chi(d) with
    chi = +1, -1, 0 for d = 1, 3 mod 4 and d even.  Summing over n <= x
    gives sum over odd d of chi(d) * floor(x/d).
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    total = 0
    for d in range(1, x + 1, 4):
        total += x // d
    for d in range(3, x + 1, 4):
        total -= x // d
    return total


# ---------------------------------------------------------------------------
# monic polynomials over F_q


def _is_prime_power(q: int) -> int | None:
    """Return the prime base if q is a prime power, else None."""
    if q < 2:
        return None
    for p in prime_sieve(q):
        p = int(p)
        if q % p == 0:
            v = q
            while v % p == 0:
                v //= p
            return p if v == 1 else None
    return None


def irreducible_count(q: int, d: int) -> int:
    """Monic irreducibles of degree d over F_q (necklace formula)."""
    mu = mobius_sieve(d)
    total = 0
    for e in range(1, d + 1):
        if d % e == 0 and mu[e]:
            total += int(mu[e]) * q ** (d // e)
    return total // d


def fq_instance(q: int, max_degree: int = 1) -> MonoidInstance:
    """Monic polynomials over F_q; the norm of degree-d elements is q^d.

    PrimeRefs are identified by (degree, index) without materializing
    polynomials; only the count of irreducibles per degree matters.
    """
    if _is_prime_power(q) is None:
        raise ValueError(f"q must be a prime power >= 2, got {q}")
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")

    def gen(bound: int) -> list[PrimeRef]:
        out = []
        d = 1
        while q**d <= bound:
            norm = q**d
            width = len(str(irreducible_count(q, d) - 1)) if irreducible_count(q, d) > 0 else 1
            for i in range(irreducible_count(q, d)):
                out.append(PrimeRef(norm, f"{d}.{i:0{width}d}"))
            d += 1
        return out

    inst = MonoidInstance(
        f"fq:q={q}", kappa=q / (q - 1), theta=0.0, generator=gen, norm_lattice=q
    )
    inst.primes_up_to(q**max_degree)
    return inst


def p1_function_field_instance(q: int, max_degree: int = 1) -> MonoidInstance:
    """Effective divisors on the projective line over F_q.

    The prime stream is that of F_q[x] plus one extra prime of norm q,
    the place at infinity; kappa becomes (q/(q-1))^2.
    """
    base = fq_instance(q, max_degree)

    def gen(bound: int) -> list[PrimeRef]:
        out = base.generator(bound)
        if q <= bound:
            out.append(PrimeRef(q, "1.inf"))
        return out

    inst = MonoidInstance(
        f"p1:q={q}", kappa=(q / (q - 1)) ** 2, theta=0.0, generator=gen, norm_lattice=q
    )
    inst.primes_up_to(q**max_degree)
    return inst


# ---------------------------------------------------------------------------
# exhaustive F_q[x] support for brute-force cross-checks


def monic_polynomials(q: int, degree: int):
    """All monic degree-`degree` polynomials as coefficient tuples
    (a_0, ..., a_{d-1}) below the leading 1.  Requires a prime q."""
    if _is_prime_power(q) != q:
        raise ValueError("exhaustive mode supports prime q only")
    coeffs = [()]
    for _ in range(degree):
        coeffs = [c + (a,) for c in coeffs for a in range(q)]
    return coeffs


def poly_mul(a, b, q):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % q
    return tuple(out)


def irreducibles_brute_force(q: int, degree: int) -> int:
    """Count monic irreducibles of degree d over F_q by sieving out all
    products of lower-degree monic polynomials."""
    if degree == 1:
        return q
    reducible = set()
    full = [c + (1,) for c in monic_polynomials(q, degree)]
    for d1 in range(1, degree // 2 + 1):
        d2 = degree - d1
        for a in monic_polynomials(q, d1):
            fa = a + (1,)
            for b in monic_polynomials(q, d2):
                reducible.add(poly_mul(fa, b + (1,), q))
    return sum(1 for f in full if f not in reducible)


def custom_instance(
    name: str,
    primes: Sequence[tuple[str, int]],
    kappa: float,
    theta: float,
    norm_lattice: int = ALL_RATIONALS,
) -> MonoidInstance:
    """Instance from an explicit (id, norm) list, e.g. a user-supplied file."""
    refs = sorted((PrimeRef(n, i) for i, n in primes), key=lambda p: (p.norm, p.id))
    if len({p.id for p in refs}) != len(refs):
        raise ValueError("duplicate prime ids in custom instance")

    def gen(bound: int) -> list[PrimeRef]:
        return [p for p in refs if p.norm <= bound]

    return MonoidInstance(name, kappa=kappa, theta=theta, generator=gen, norm_lattice=norm_lattice)


def load_custom_instance(path, kappa: float, theta: float, name="custom") -> MonoidInstance:
    """Read `id<TAB>norm` lines sorted by norm."""
    pairs = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            pid, norm_s = line.split("\t")
            pairs.append((pid, int(norm_s)))
    return custom_instance(name, pairs, kappa, theta)
