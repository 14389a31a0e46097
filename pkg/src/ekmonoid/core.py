"""Element model and the omega-family of multiplicative statistics.

Elements of a normed abelian monoid are represented by their prime
factorization: a finite map from primes to positive exponents.  Every
statistic here (omega, big_omega, omega_k, omega_T, log of the divisor
count, weighted omega) is a pure function of that exponent map, so the
module is independent of any concrete monoid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping


@dataclass(frozen=True, order=True)
class PrimeRef:
    """A prime of some monoid instance: a stable id plus its norm.

    Ordering is by (norm, id) so streams and factorizations have a
    canonical order even when several primes share a norm.
    """

    norm: int
    id: str

    def __post_init__(self):
        if self.norm < 2:
            raise ValueError(f"prime norm must be >= 2, got {self.norm}")


class Factorization:
    """An element written as a finite product of primes with exponents.

    Immutable.  The empty factorization is the monoid identity (norm 1).
    Exponents are stored only when positive; terms are kept sorted by
    (norm, id).
    """

    __slots__ = ("_terms", "_index")

    def __init__(self, terms: Mapping[PrimeRef, int] | Iterable[tuple[PrimeRef, int]] = ()):
        items = dict(terms)
        for p, e in items.items():
            if not isinstance(p, PrimeRef):
                raise TypeError("keys must be PrimeRef")
            if e < 1:
                raise ValueError(f"exponent must be >= 1, got {e} for {p.id}")
        ordered = tuple(sorted(items.items(), key=lambda kv: kv[0]))
        object.__setattr__(self, "_terms", ordered)
        object.__setattr__(self, "_index", dict(ordered))

    IDENTITY: "Factorization"

    @property
    def terms(self) -> tuple[tuple[PrimeRef, int], ...]:
        return self._terms

    def exponent(self, p: PrimeRef) -> int:
        return self._index.get(p, 0)

    def __eq__(self, other):
        return isinstance(other, Factorization) and self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __len__(self):
        return len(self._terms)

    def __repr__(self):
        if not self._terms:
            return "Factorization(1)"
        body = "*".join(f"{p.id}^{e}" if e > 1 else p.id for p, e in self._terms)
        return f"Factorization({body})"

    # ---- statistics -------------------------------------------------

    def norm(self) -> int:
        n = 1
        for p, e in self._terms:
            n *= p.norm ** e
        return n

    def omega(self) -> int:
        """Distinct primes."""
        return len(self._terms)

    def big_omega(self) -> int:
        """Primes counted with multiplicity."""
        return sum(e for _, e in self._terms)

    def omega_k(self, k: int) -> int:
        """Primes whose exponent is exactly k."""
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        return sum(1 for _, e in self._terms if e == k)

    def project_k(self, k: int) -> "Factorization":
        """Sub-element keeping only the primes of exponent exactly k."""
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        return Factorization({p: e for p, e in self._terms if e == k})

    def log_divisor_count(self) -> float:
        """Natural log of the divisor count, sum of log(e+1)."""
        return sum(math.log(e + 1) for _, e in self._terms)

    def divisor_count(self) -> int:
        n = 1
        for _, e in self._terms:
            n *= e + 1
        return n

    def omega_t(self) -> int:
        """(# primes with odd exponent) - (# primes with even exponent)."""
        return sum(1 if e % 2 else -1 for _, e in self._terms)

    def omega_weighted(self, weights: "WeightSequence"):
        """Sum of a_e over the stored exponents; exact when a_i are exact."""
        total = 0
        for _, e in self._terms:
            total = total + weights.coefficient(e)
        return total

    def is_h_free(self, h: int) -> bool:
        """All exponents <= h-1 (vacuously true for the identity)."""
        if h < 2:
            raise ValueError(f"h must be >= 2 for h-free, got {h}")
        return all(e <= h - 1 for _, e in self._terms)

    def is_h_full(self, h: int) -> bool:
        """All exponents >= h (vacuously true for the identity)."""
        if h < 1:
            raise ValueError(f"h must be >= 1 for h-full, got {h}")
        return all(e >= h for _, e in self._terms)

    def combine(self, other: "Factorization") -> "Factorization":
        """Monoid product: exponents add."""
        merged = dict(self._terms)
        for p, e in other._terms:
            merged[p] = merged.get(p, 0) + e
        return Factorization(merged)

    def max_exponent(self) -> int:
        return max((e for _, e in self._terms), default=0)

    # ---- serialization ----------------------------------------------

    def to_line(self) -> str:
        """`norm<TAB>id^exp,id^exp,...`; the identity is `1<TAB>-`."""
        if not self._terms:
            return "1\t-"
        body = ",".join(f"{p.id}^{e}" for p, e in self._terms)
        return f"{self.norm()}\t{body}"

    @staticmethod
    def from_line(line: str, prime_lookup: Mapping[str, PrimeRef]) -> "Factorization":
        norm_s, _, body = line.rstrip("\n").partition("\t")
        if body == "-":
            f = Factorization()
        else:
            terms = {}
            for chunk in body.split(","):
                pid, _, exp = chunk.rpartition("^")
                terms[prime_lookup[pid]] = int(exp)
            f = Factorization(terms)
        if f.norm() != int(norm_s):
            raise ValueError(f"norm mismatch on line: {line!r}")
        return f


Factorization.IDENTITY = Factorization()


GROWTH_BASE = 2  # smallest possible prime norm, bounds admissible coefficient growth


@dataclass(frozen=True)
class WeightSequence:
    """A coefficient sequence a_1, a_2, ... defining a weighted omega statistic.

    The growth certificate (B, alpha, k) declares a_i << B^i with
    B <= 2^(1/k - alpha); only that inequality is checked, not the growth
    itself.
    """

    name: str
    coefficient: Callable[[int], object] = field(compare=False)
    growth_b: float = 1.0
    growth_alpha: float = 0.5
    growth_k: int = 1

    def __post_init__(self):
        if self.growth_b <= 0 or self.growth_alpha <= 0 or self.growth_k < 1:
            raise ValueError("growth certificate requires B > 0, alpha > 0, k >= 1")
        if not self.certificate_ok():
            raise ValueError(
                f"growth certificate violated: B={self.growth_b} > "
                f"2^(1/{self.growth_k} - {self.growth_alpha})"
            )

    def certificate_ok(self) -> bool:
        return self.growth_b <= GROWTH_BASE ** (1.0 / self.growth_k - self.growth_alpha)

    def __add__(self, other: "WeightSequence") -> "WeightSequence":
        a, b = self.coefficient, other.coefficient
        return WeightSequence(
            name=f"{self.name}+{other.name}",
            coefficient=lambda i: a(i) + b(i),
            growth_b=max(self.growth_b, other.growth_b),
            growth_alpha=min(self.growth_alpha, other.growth_alpha),
            growth_k=max(self.growth_k, other.growth_k),
        )


ALL_ONES = WeightSequence("omega", lambda i: 1, growth_b=1.0, growth_alpha=0.5, growth_k=1)
LINEAR = WeightSequence("big_omega", lambda i: i, growth_b=1.2, growth_alpha=0.2, growth_k=1)
LOG_DIVISOR = WeightSequence(
    "log_divisor", lambda i: math.log(i + 1), growth_b=1.2, growth_alpha=0.2, growth_k=1
)
ALTERNATING = WeightSequence(
    "omega_t", lambda i: 1 if i % 2 else -1, growth_b=1.0, growth_alpha=0.5, growth_k=1
)


def indicator(k: int) -> WeightSequence:
    """a_i = 1 at i = k and 0 elsewhere, so the statistic is omega_k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return WeightSequence(
        f"omega_{k}",
        lambda i: 1 if i == k else 0,
        growth_b=1.0,
        growth_alpha=1.0 / (2 * k),
        growth_k=k,
    )


def table_weights(name, table: Mapping[int, Fraction], growth_b, growth_alpha, growth_k) -> WeightSequence:
    """Weights from an explicit finite table; unspecified indices are 0."""
    frozen = dict(table)
    return WeightSequence(
        name,
        lambda i: frozen.get(i, 0),
        growth_b=growth_b,
        growth_alpha=growth_alpha,
        growth_k=growth_k,
    )
