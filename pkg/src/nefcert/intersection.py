"""F-curve enumeration and intersection numbers.

Covers the genus-g inequality test for symmetric divisors, the symmetric
genus-0 facet functional in the boundary basis, and the labelled-space
intersection oracle used to validate every expansion identity in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from nefcert.divisor_algebra import (
    BVector,
    DomainError,
    SymDivisorMg,
    _as_rational_tuple,
    fold_index,
)


@dataclass(frozen=True)
class FPartition:
    """A partition of g into exactly 4 positive parts, sorted ascending."""

    parts: tuple[int, int, int, int]

    def __post_init__(self) -> None:
        parts = tuple(sorted(int(p) for p in self.parts))
        object.__setattr__(self, "parts", parts)
        if len(parts) != 4 or parts[0] < 1:
            raise DomainError(f"need 4 positive parts, got {self.parts}")

    @property
    def genus(self) -> int:
        return sum(self.parts)


def enumerate_f_partitions(g: int) -> list[FPartition]:
    """All 4-part partitions of g, ascending lexicographic on sorted parts."""
    out: list[FPartition] = []
    for i in range(1, g // 4 + 1):
        for j in range(i, (g - i) // 3 + 1):
            for k in range(j, (g - i - j) // 2 + 1):
                l = g - i - j - k
                if l >= k:
                    out.append(FPartition((i, j, k, l)))
    return out


@dataclass(frozen=True)
class EVector:
    """A symmetric genus-0 divisor sum e_i B_i in the boundary basis."""

    genus: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", _as_rational_tuple(self.entries))
        expected = self.genus // 2 - 1
        if len(self.entries) != expected:
            raise DomainError(
                f"expected {expected} entries (e_2..e_{self.genus // 2}) for genus "
                f"{self.genus}, got {len(self.entries)}"
            )

    def e(self, m: int) -> Fraction:
        """Folded accessor with e(1) = e(g-1) = 0."""
        idx = fold_index(m, self.genus)
        if idx == 1:
            return Fraction(0)
        return self.entries[idx - 2]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.entries)


def f_intersection_sym_e(e: EVector, p: FPartition) -> Fraction:
    """Intersection of sum e_i B_i with the F-curve of a 4-part partition."""
    if p.genus != e.genus:
        raise DomainError(f"partition sums to {p.genus}, divisor has genus {e.genus}")
    i, j, k, l = p.parts
    return (
        e.e(i + j) + e.e(i + k) + e.e(i + l) - e.e(i) - e.e(j) - e.e(k) - e.e(l)
    )


@dataclass(frozen=True)
class FViolation:
    """One violated inequality family, with witness indices and the value."""

    family: int
    indices: tuple[int, ...]
    value: Fraction

    def describe(self) -> str:
        return f"family {self.family} at indices {self.indices}: value {self.value} < 0"


def check_f_divisor_mg(divisor: SymDivisorMg) -> list[FViolation]:
    """All violated inequality families; an empty list means the divisor passes.

    Families (symmetric case, all coefficient lookups folded):
      1. a - 12*b_0 + b_1 >= 0
      2. b_i >= 0
      3. 2*b_0 - b_i >= 0 for i >= 1
      4. b(i) + b(j) >= b(i+j) for i, j >= 1 with i + j <= g - 1
      5. b(i)+b(j)+b(k)+b(l) >= b(i+j)+b(i+k)+b(i+l) for 4-part partitions of g
    """
    g = divisor.genus
    b0 = divisor.b0
    violations: list[FViolation] = []

    value = divisor.lambda_coeff - 12 * b0 + divisor.delta_coeffs[1]
    if value < 0:
        violations.append(FViolation(1, (), value))
    for i, bi in enumerate(divisor.delta_coeffs):
        if bi < 0:
            violations.append(FViolation(2, (i,), bi))
    for i in range(1, g // 2 + 1):
        value = 2 * b0 - divisor.delta_coeffs[i]
        if value < 0:
            violations.append(FViolation(3, (i,), value))
    for i in range(1, g):
        for j in range(i, g - i):
            value = divisor.b(i) + divisor.b(j) - divisor.b(i + j)
            if value < 0:
                violations.append(FViolation(4, (i, j), value))
    for p in enumerate_f_partitions(g):
        i, j, k, l = p.parts
        value = (
            divisor.b(i) + divisor.b(j) + divisor.b(k) + divisor.b(l)
            - divisor.b(i + j) - divisor.b(i + k) - divisor.b(i + l)
        )
        if value < 0:
            violations.append(FViolation(5, p.parts, value))
    return violations


def is_f_divisor(divisor: SymDivisorMg) -> bool:
    return not check_f_divisor_mg(divisor)


def f_inequality_value(b: BVector, parts: tuple[int, int, int, int]) -> Fraction:
    """Family-5 value on folded b-coefficients for arbitrary block weight sums."""
    i, j, k, l = parts
    return (
        b.b(i) + b.b(j) + b.b(k) + b.b(l) - b.b(i + j) - b.b(i + k) - b.b(i + l)
    )


# ---------------------------------------------------------------------------
# Labelled-space oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LabelledFCurve:
    """A partition of the labelled points {1..n} into exactly 4 nonempty blocks."""

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        blocks = tuple(frozenset(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if len(blocks) != 4 or any(not b for b in blocks):
            raise DomainError("curve needs exactly 4 nonempty blocks")
        points = [p for b in blocks for p in b]
        if len(points) != len(set(points)):
            raise DomainError("curve blocks are not disjoint")
        n = len(points)
        if set(points) != set(range(1, n + 1)):
            raise DomainError("curve blocks must partition {1..n}")

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)


def all_f_curves(n: int) -> Iterator[LabelledFCurve]:
    """All set partitions of {1..n} into exactly 4 blocks (restricted growth)."""
    if n < 4:
        return

    def rec(next_point: int, blocks: list[list[int]]) -> Iterator[LabelledFCurve]:
        remaining = n - next_point + 1
        if next_point > n:
            if len(blocks) == 4:
                yield LabelledFCurve(tuple(frozenset(b) for b in blocks))
            return
        if len(blocks) + remaining < 4:
            return
        for b in blocks:
            b.append(next_point)
            yield from rec(next_point + 1, blocks)
            b.pop()
        if len(blocks) < 4:
            blocks.append([next_point])
            yield from rec(next_point + 1, blocks)
            blocks.pop()

    yield from rec(1, [])


def _canonical_labelled_side(n: int, side: frozenset[int]) -> frozenset[int]:
    comp = frozenset(range(1, n + 1)) - side
    if (len(side), tuple(sorted(side))) <= (len(comp), tuple(sorted(comp))):
        return side
    return comp


class LabelledExpression:
    """A formal sum of labelled delta_S, psi_i and K with rational coefficients."""

    def __init__(self, n: int) -> None:
        if n < 4:
            raise DomainError(f"labelled expressions need n >= 4, got {n}")
        self.n = n
        self.psi: dict[int, Fraction] = {}
        self.k = Fraction(0)
        self.boundary: dict[frozenset[int], Fraction] = {}

    def add_psi(self, point: int, coeff) -> LabelledExpression:
        if not 1 <= point <= self.n:
            raise DomainError(f"point {point} outside 1..{self.n}")
        self.psi[point] = self.psi.get(point, Fraction(0)) + Fraction(coeff)
        return self

    def add_k(self, coeff) -> LabelledExpression:
        self.k += Fraction(coeff)
        return self

    def add_delta(self, side: Iterable[int], coeff) -> LabelledExpression:
        s = frozenset(int(p) for p in side)
        if not 2 <= len(s) <= self.n - 2:
            raise DomainError(f"side size {len(s)} outside [2, {self.n - 2}]")
        if not s <= set(range(1, self.n + 1)):
            raise DomainError(f"side {sorted(s)} outside 1..{self.n}")
        key = _canonical_labelled_side(self.n, s)
        self.boundary[key] = self.boundary.get(key, Fraction(0)) + Fraction(coeff)
        return self


def labelled_intersection(expr: LabelledExpression, curve: LabelledFCurve) -> Fraction:
    """Exact intersection number of a labelled expression with an F-curve.

    delta_S: +1 when S is a union of two blocks, -1 when S or its complement
    is a single block, 0 otherwise.  psi_i: 1 when {i} is a singleton block.
    K: 2 minus the number of singleton blocks.
    """
    if curve.n != expr.n:
        raise DomainError(f"curve on {curve.n} points, expression on {expr.n}")
    total = Fraction(0)
    singleton_points = {next(iter(b)) for b in curve.blocks if len(b) == 1}
    for point, coeff in expr.psi.items():
        if point in singleton_points:
            total += coeff
    total += expr.k * (2 - len(singleton_points))
    for side, coeff in expr.boundary.items():
        if coeff == 0:
            continue
        inside = 0
        straddle = False
        for block in curve.blocks:
            if block <= side:
                inside += 1
            elif block & side:
                straddle = True
                break
        if straddle:
            continue
        if inside == 2:
            total += coeff
        elif inside in (1, 3):
            total -= coeff
    return total


def expressions_agree_on_curves(
    e1: LabelledExpression, e2: LabelledExpression
) -> bool:
    """Numerical-equality oracle: same value on every labelled F-curve."""
    if e1.n != e2.n:
        raise DomainError("expressions live on different point counts")
    return all(
        labelled_intersection(e1, c) == labelled_intersection(e2, c)
        for c in all_f_curves(e1.n)
    )
