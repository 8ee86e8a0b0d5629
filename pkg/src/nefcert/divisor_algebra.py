"""Core exact-rational types: symmetric divisors, weighted profiles, boundary classes.

Everything here is an immutable value; all arithmetic is `fractions.Fraction`.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping

#: Exact rational scalar used throughout the package.
Rational = Fraction


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


_RATIONAL_TOKEN = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def parse_rational(token: str) -> Fraction:
    """Parse a rational from `"p/q"` or a decimal integer string."""
    text = token.strip()
    if not _RATIONAL_TOKEN.match(text):
        raise DomainError(f"malformed rational token {token!r}")
    value = Fraction(text)
    if "/" in text and int(text.split("/")[1]) == 0:
        raise DomainError(f"zero denominator in {token!r}")  # pragma: no cover
    return value


def format_rational(value: Fraction) -> str:
    """Serialize reduced, denominator-positive: `"25/3"`, `"-5/6"`, `"0"`."""
    return str(Fraction(value))


def fold_index(m: int, g: int) -> int:
    """Fold a symmetric coefficient index into [1, g//2] via m <-> g-m."""
    if not 1 <= m <= g - 1:
        raise DomainError(f"index {m} outside [1, {g - 1}] for genus {g}")
    return min(m, g - m)


def _as_rational_tuple(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class SymDivisorMg:
    """A symmetric divisor a*lambda - sum_{i=0}^{g//2} b_i delta_i on the genus-g space."""

    genus: int
    lambda_coeff: Fraction
    delta_coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.genus < 2:
            raise DomainError(f"genus must be >= 2, got {self.genus}")
        object.__setattr__(self, "lambda_coeff", Fraction(self.lambda_coeff))
        object.__setattr__(self, "delta_coeffs", _as_rational_tuple(self.delta_coeffs))
        expected = self.genus // 2 + 1
        if len(self.delta_coeffs) != expected:
            raise DomainError(
                f"expected {expected} delta coefficients for genus {self.genus}, "
                f"got {len(self.delta_coeffs)}"
            )

    @property
    def b0(self) -> Fraction:
        return self.delta_coeffs[0]

    def b(self, m: int) -> Fraction:
        """Folded coefficient lookup b_m = b_{g-m} for 1 <= m <= g-1."""
        return self.delta_coeffs[fold_index(m, self.genus)]

    def b_vector(self) -> BVector:
        return BVector(self.genus, self.delta_coeffs[1:])

    def is_zero(self) -> bool:
        return self.lambda_coeff == 0 and all(c == 0 for c in self.delta_coeffs)

    def spec_string(self) -> str:
        coeffs = ",".join(format_rational(c) for c in self.delta_coeffs)
        return f"{self.genus};{format_rational(self.lambda_coeff)};{coeffs}"


@dataclass(frozen=True)
class BVector:
    """The boundary coefficients b_1 .. b_{g//2} that determine the flag pullback."""

    genus: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", _as_rational_tuple(self.entries))
        if len(self.entries) != self.genus // 2:
            raise DomainError(
                f"expected {self.genus // 2} entries for genus {self.genus}, "
                f"got {len(self.entries)}"
            )

    def b(self, m: int) -> Fraction:
        """Folded accessor b(m) := b_{min(m, g-m)} for 1 <= m <= g-1."""
        return self.entries[fold_index(m, self.genus) - 1]

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)


@dataclass(frozen=True)
class Profile:
    """A multiset of positive point-weights summing to g, sorted descending.

    Weights >= 2 form the attach part A (size a); weight-1 points form Z
    (size z); N = a + z is the number of marked points of the target space.
    """

    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        ws = tuple(sorted((int(w) for w in self.weights), reverse=True))
        object.__setattr__(self, "weights", ws)
        if not ws:
            raise DomainError("profile needs at least one weight")
        if ws[-1] < 1:
            raise DomainError(f"weights must be positive, got {ws}")

    @property
    def genus(self) -> int:
        return sum(self.weights)

    @property
    def point_count(self) -> int:
        return len(self.weights)

    @property
    def a(self) -> int:
        return sum(1 for w in self.weights if w >= 2)

    @property
    def z(self) -> int:
        return sum(1 for w in self.weights if w == 1)

    def weight_counts(self) -> dict[int, int]:
        return dict(Counter(self.weights))

    @staticmethod
    def all_ones(g: int) -> Profile:
        return Profile((1,) * g)

    @staticmethod
    def parse(text: str) -> Profile:
        try:
            weights = tuple(int(tok) for tok in text.split(","))
        except ValueError as exc:
            raise DomainError(f"malformed profile {text!r}") from exc
        return Profile(weights)

    def serialize(self) -> str:
        return ",".join(str(w) for w in self.weights)


@dataclass(frozen=True)
class BoundaryClass:
    """Canonical representative of a boundary divisor class on a profile.

    `side` is the canonical sub-multiset of the profile's weights; the class
    is the unordered pair {side, complement}.
    """

    side: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "side", tuple(sorted(self.side, reverse=True)))

    @property
    def weight(self) -> int:
        return sum(self.side)

    @property
    def size(self) -> int:
        return len(self.side)

    def sort_key(self) -> tuple:
        return (len(self.side), self.side)


def _complement_side(profile: Profile, side: tuple[int, ...]) -> tuple[int, ...]:
    remaining = Counter(profile.weights)
    remaining.subtract(Counter(side))
    if any(v < 0 for v in remaining.values()):
        raise DomainError(f"side {side} is not a sub-multiset of profile {profile.weights}")
    return tuple(sorted(remaining.elements(), reverse=True))


def canonicalize(profile: Profile, side: Iterable[int]) -> BoundaryClass:
    """Map a side and its complement to the shared canonical representative.

    Rule: smaller cardinality wins; on ties the lexicographically smaller
    descending weight list wins; equal multisets are their own canonical form.
    """
    s = tuple(sorted((int(w) for w in side), reverse=True))
    n = profile.point_count
    if not 2 <= len(s) <= n - 2:
        raise DomainError(f"side size {len(s)} outside [2, {n - 2}] on {profile.weights}")
    comp = _complement_side(profile, s)
    if (len(s), s) <= (len(comp), comp):
        return BoundaryClass(s)
    return BoundaryClass(comp)


@lru_cache(maxsize=None)
def _canonical_classes_cached(weights: tuple[int, ...]) -> tuple[BoundaryClass, ...]:
    profile = Profile(weights)
    n = profile.point_count
    counts = sorted(profile.weight_counts().items(), reverse=True)
    seen: set[BoundaryClass] = set()
    choices = [range(mult + 1) for _, mult in counts]
    for pick in product(*choices):
        size = sum(pick)
        if not 2 <= size <= n - 2:
            continue
        side: list[int] = []
        for (w, _), k in zip(counts, pick):
            side.extend([w] * k)
        seen.add(canonicalize(profile, tuple(side)))
    return tuple(sorted(seen, key=BoundaryClass.sort_key))


def canonical_classes(profile: Profile) -> tuple[BoundaryClass, ...]:
    """All canonical boundary classes of a profile, in a fixed total order."""
    return _canonical_classes_cached(profile.weights)


def side_counts(cls: BoundaryClass) -> tuple[int, int]:
    """(b, y): number of attach-part and weight-1 entries of the canonical side."""
    b = sum(1 for w in cls.side if w >= 2)
    y = len(cls.side) - b
    return b, y


def orbit_multiplicity(profile: Profile, cls: BoundaryClass) -> int:
    """Number of labelled unordered pairs {T, T^c} realizing the class."""
    if canonicalize(profile, cls.side) != cls:
        raise DomainError(f"class {cls.side} is not canonical on {profile.weights}")
    counts = sorted(profile.weight_counts().items(), reverse=True)
    n = profile.point_count
    labelled = 0
    choices = [range(mult + 1) for _, mult in counts]
    for pick in product(*choices):
        size = sum(pick)
        if not 2 <= size <= n - 2:
            continue
        side: list[int] = []
        for (w, _), k in zip(counts, pick):
            side.extend([w] * k)
        if canonicalize(profile, tuple(side)) != cls:
            continue
        ways = 1
        for (w, mult), k in zip(counts, pick):
            ways *= math.comb(mult, k)
        labelled += ways
    if labelled == 0:
        raise DomainError(f"class {cls.side} not realizable on profile {profile.weights}")
    # Each unordered pair {T, T^c} is hit by exactly two labelled sides.
    return labelled // 2


@dataclass(frozen=True)
class WeightedDivisor:
    """A divisor on a profile's space: per-weight psi coefficients, a K
    coefficient, and a canonical boundary-class coefficient table.

    The engine uses two normal forms: psi form (k_coeff = 0) and K form
    (all psi coefficients zero).
    """

    profile: Profile
    psi_coeffs: Mapping[int, Fraction]
    k_coeff: Fraction
    boundary_coeffs: Mapping[BoundaryClass, Fraction]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "psi_coeffs", {int(w): Fraction(v) for w, v in self.psi_coeffs.items()}
        )
        object.__setattr__(self, "k_coeff", Fraction(self.k_coeff))
        object.__setattr__(
            self, "boundary_coeffs", {c: Fraction(v) for c, v in self.boundary_coeffs.items()}
        )
        distinct = set(self.profile.weights)
        if not set(self.psi_coeffs) <= distinct:
            raise DomainError(
                f"psi keys {sorted(self.psi_coeffs)} not among profile weights {sorted(distinct)}"
            )

    @property
    def is_psi_form(self) -> bool:
        return self.k_coeff == 0

    @property
    def is_k_form(self) -> bool:
        return all(v == 0 for v in self.psi_coeffs.values())

    def psi(self, weight: int) -> Fraction:
        return self.psi_coeffs.get(weight, Fraction(0))

    def boundary(self, cls: BoundaryClass) -> Fraction:
        return self.boundary_coeffs.get(cls, Fraction(0))

    def is_zero(self) -> bool:
        return (
            self.k_coeff == 0
            and all(v == 0 for v in self.psi_coeffs.values())
            and all(v == 0 for v in self.boundary_coeffs.values())
        )

    @staticmethod
    def zero(profile: Profile) -> WeightedDivisor:
        return WeightedDivisor(profile, {}, Fraction(0), {})
