"""Fast numerical nef criteria for symmetric divisors.

Each criterion inspects only the coefficient vector and returns a verdict:
when it applies, the divisor is nef (given that it already passed the
F-inequality check, which callers are responsible for).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from nefcert.divisor_algebra import BVector, DomainError, SymDivisorMg, fold_index


class CriterionName(enum.Enum):
    B0 = "B0"
    LEVEL0 = "LEVEL0"
    B1 = "B1"
    BM = "BM"
    INDUCT = "INDUCT"
    STEP0 = "STEP0"


@dataclass(frozen=True)
class ZeroPropagationResult:
    """Closure of zero/equality propagation over folded indices 1..g//2."""

    genus: int
    classes: tuple[tuple[int, ...], ...]
    zero_indices: frozenset[int]
    derived_equalities: tuple[tuple[int, int], ...]
    consistent: bool
    conflicts: tuple[str, ...]


@dataclass(frozen=True)
class CriterionVerdict:
    name: CriterionName
    applies: bool
    witness_c: Fraction | None = None
    witness_interval: tuple[Fraction, Fraction] | None = None
    trace: ZeroPropagationResult | None = None
    detail: str = ""


def _flag_coefficient(g: int, i: int, b1: Fraction, bi: Fraction, c: Fraction) -> Fraction:
    """Coefficient of the size-i class in the flag big c-average."""
    return (b1 - c) * Fraction(i * (g - i), g - 1) + 2 * c - bi


def criterion_b0(divisor: SymDivisorMg) -> CriterionVerdict:
    """Applies when every flag-average coefficient at c = b_0 lies in [0, b_0]:
    -b_0(g-1) <= i(g-i)(b_1-b_0) + (g-1)(b_0-b_i) <= 0 for all 2 <= i <= g//2."""
    g = divisor.genus
    b0 = divisor.b0
    b1 = divisor.delta_coeffs[1] if g // 2 >= 1 else Fraction(0)
    for i in range(2, g // 2 + 1):
        middle = i * (g - i) * (b1 - b0) + (g - 1) * (b0 - divisor.delta_coeffs[i])
        if not -b0 * (g - 1) <= middle <= 0:
            return CriterionVerdict(
                CriterionName.B0, False, detail=f"bound fails at i={i}: {middle}"
            )
    return CriterionVerdict(CriterionName.B0, True, witness_c=b0)


def _feasible_interval(
    constraints: list[tuple[Fraction, Fraction]]
) -> tuple[Fraction | None, Fraction | None] | None:
    """Solve a system alpha + beta*c >= 0; returns (lo, hi) with None meaning
    unbounded on that side, or None when infeasible."""
    lo: Fraction | None = None
    hi: Fraction | None = None
    for alpha, beta in constraints:
        if beta > 0:
            bound = -alpha / beta
            if lo is None or bound > lo:
                lo = bound
        elif beta < 0:
            bound = -alpha / beta
            if hi is None or bound < hi:
                hi = bound
        elif alpha < 0:
            return None
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi


def criterion_level0(divisor: SymDivisorMg) -> CriterionVerdict:
    """Applies when some c > 0 keeps every flag-average coefficient in [0, c].

    Each coefficient is affine in c, so feasibility is an exact interval
    intersection; the witness is the interval's lower endpoint when that is
    positive, otherwise the smallest available positive choice.
    """
    g = divisor.genus
    b1 = divisor.delta_coeffs[1]
    constraints: list[tuple[Fraction, Fraction]] = []
    for i in range(2, g // 2 + 1):
        scale = Fraction(i * (g - i), g - 1)
        alpha = b1 * scale - divisor.delta_coeffs[i]
        beta = 2 - scale
        constraints.append((alpha, beta))        # coeff_i(c) >= 0
        constraints.append((-alpha, 1 - beta))   # c - coeff_i(c) >= 0
    interval = _feasible_interval(constraints)
    if interval is None:
        return CriterionVerdict(CriterionName.LEVEL0, False, detail="empty interval")
    lo, hi = interval
    if hi is not None and hi <= 0:
        return CriterionVerdict(
            CriterionName.LEVEL0, False, detail="no positive c is feasible"
        )
    if lo is not None and lo > 0:
        witness = lo
    elif hi is not None:
        witness = hi
    else:
        witness = Fraction(1)
    lo_out = lo if lo is not None and lo > 0 else Fraction(0)
    return CriterionVerdict(
        CriterionName.LEVEL0, True, witness_c=witness,
        witness_interval=(lo_out, hi) if hi is not None else None,
    )


def criterion_b1(divisor: SymDivisorMg) -> CriterionVerdict:
    """Applies when b_i <= b_1 for all 2 <= i <= g//2."""
    b1 = divisor.delta_coeffs[1]
    for i in range(2, divisor.genus // 2 + 1):
        if divisor.delta_coeffs[i] > b1:
            return CriterionVerdict(
                CriterionName.B1, False, detail=f"b_{i} = {divisor.delta_coeffs[i]} > b_1"
            )
    return CriterionVerdict(CriterionName.B1, True)


def criterion_bm(divisor: SymDivisorMg) -> CriterionVerdict:
    """Applies when 2 * min(b_i, i >= 1) >= max(b_i, i >= 1); any c in
    [max/2, min] then makes every restriction coefficient land in [c, 2c]."""
    entries = divisor.delta_coeffs[1:]
    low, high = min(entries), max(entries)
    if 2 * low < high:
        return CriterionVerdict(
            CriterionName.BM, False, detail=f"2*min = {2 * low} < max = {high}"
        )
    return CriterionVerdict(
        CriterionName.BM, True, witness_c=high / 2, witness_interval=(high / 2, low)
    )


def zero_propagation(b: BVector) -> ZeroPropagationResult:
    """Fixpoint closure of the zero rules on folded indices.

    A zero at (unfolded) index m forces b_j = b_k whenever j + k = m and
    b_j = b_{m+j} for j >= 1 with m + j <= g - 1.  Reports the equality
    partition, the zero set, and any conflict with the given values.
    """
    g = b.genus
    k_max = g // 2
    parent = list(range(k_max + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    zero_roots: set[int] = set()

    def union(x: int, y: int) -> bool:
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        parent[ry] = rx
        if ry in zero_roots:
            zero_roots.discard(ry)
            zero_roots.add(rx)
        return True

    for idx in range(1, k_max + 1):
        if b.entries[idx - 1] == 0:
            zero_roots.add(find(idx))

    changed = True
    while changed:
        changed = False
        zero_now = [i for i in range(1, k_max + 1) if find(i) in zero_roots]
        for i in zero_now:
            for m in {i, g - i}:
                if m > g - 1:
                    continue
                for j in range(1, m):
                    if m - j >= 1:
                        changed |= union(fold_index(j, g), fold_index(m - j, g))
                for j in range(1, g - m):
                    changed |= union(fold_index(j, g), fold_index(m + j, g))
        # Re-sync the zero markers after merges.
        new_zero = {find(r) for r in zero_roots}
        if new_zero != zero_roots:
            zero_roots = new_zero
            changed = True

    groups: dict[int, list[int]] = {}
    for i in range(1, k_max + 1):
        groups.setdefault(find(i), []).append(i)
    classes = tuple(tuple(sorted(g_)) for g_ in sorted(groups.values()))
    zero_indices = frozenset(
        i for i in range(1, k_max + 1) if find(i) in zero_roots
    )
    derived = tuple(
        (grp[i], grp[j])
        for grp in classes
        for i in range(len(grp))
        for j in range(i + 1, len(grp))
    )

    conflicts: list[str] = []
    for grp in classes:
        values = {b.entries[i - 1] for i in grp}
        if len(values) > 1:
            conflicts.append(f"indices {grp} forced equal but values differ: {sorted(values)}")
    for i in sorted(zero_indices):
        if b.entries[i - 1] != 0:
            conflicts.append(f"index {i} forced zero but b_{i} = {b.entries[i - 1]}")
    return ZeroPropagationResult(
        g, classes, zero_indices, derived, not conflicts, tuple(conflicts)
    )


def criterion_induct(divisor: SymDivisorMg) -> CriterionVerdict:
    """Applies when g is odd with some b_j = 0, or g even with b_j = 0 for
    some j < g/2; the witness is the zero-propagation trace."""
    g = divisor.genus
    limit = g // 2 if g % 2 == 1 else g // 2 - 1
    zero_j = [
        j for j in range(1, limit + 1) if divisor.delta_coeffs[j] == 0
    ]
    if not zero_j:
        return CriterionVerdict(
            CriterionName.INDUCT, False, detail="no admissible zero index"
        )
    trace = zero_propagation(divisor.b_vector())
    return CriterionVerdict(
        CriterionName.INDUCT, True, trace=trace, detail=f"b_{zero_j[0]} = 0"
    )


@dataclass(frozen=True)
class Step0Result:
    """Largest c > 0 keeping the flag big average effective, when it exists."""

    c: Fraction | None
    status: str  # "ok" | "blocked" | "trivial" | "unbounded"


def step0_constant(b: BVector) -> Step0Result:
    """c = min beta_i / (-alpha_i) over i >= 3 with alpha_i < 0 and beta_i > 0,
    with alpha_i = (2g-2-i(g-i))/(g-1) and beta_i = (i(g-i)b_1-(g-1)b_i)/(g-1).

    Absent when the divisor is zero (trivial), when some blocking index has
    alpha_i < 0 and beta_i = 0, or when no index bounds c (g <= 7)."""
    g = b.genus
    if g < 4:
        raise DomainError(f"step-0 constant needs genus >= 4, got {g}")
    if b.is_zero():
        return Step0Result(None, "trivial")
    b1 = b.b(1)
    best: Fraction | None = None
    for i in range(3, g // 2 + 1):
        alpha = Fraction(2 * g - 2 - i * (g - i), g - 1)
        beta = Fraction(i * (g - i), g - 1) * b1 - b.entries[i - 1]
        if alpha >= 0:
            continue
        if beta == 0:
            return Step0Result(None, "blocked")
        if beta < 0:
            # Not an F-divisor (KM bound violated); no positive c works.
            return Step0Result(None, "blocked")
        candidate = beta / (-alpha)
        if best is None or candidate < best:
            best = candidate
    if best is None:
        return Step0Result(None, "unbounded")
    return Step0Result(best, "ok")


#: Engine evaluation order: cheap comparisons first, with the zero-index
#: criterion ahead of the b_1 bound so divisors with an interior zero close
#: through their propagation trace.
DEFAULT_CRITERIA_ORDER: tuple[CriterionName, ...] = (
    CriterionName.BM,
    CriterionName.INDUCT,
    CriterionName.B1,
    CriterionName.B0,
    CriterionName.LEVEL0,
)

CRITERION_FUNCTIONS = {
    CriterionName.B0: criterion_b0,
    CriterionName.LEVEL0: criterion_level0,
    CriterionName.B1: criterion_b1,
    CriterionName.BM: criterion_bm,
    CriterionName.INDUCT: criterion_induct,
}


def evaluate_criteria(
    divisor: SymDivisorMg, enabled: tuple[CriterionName, ...]
) -> CriterionVerdict | None:
    """First applying verdict among the enabled criteria, in the given order."""
    for name in enabled:
        verdict = CRITERION_FUNCTIONS[name](divisor)
        if verdict.applies:
            return verdict
    return None
