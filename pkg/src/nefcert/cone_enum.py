"""Facet construction, exact extremal-ray enumeration, lifting, verification.

The boundary-curve inequalities of the symmetric genus-0 space cut out a
polyhedral cone in the coordinates e_2..e_{g//2}.  Rays are enumerated by
the double description method in exact integer arithmetic: start from a
simplicial subcone spanned by d independent facet rows, then insert the
remaining rows one at a time, combining adjacent rays across each new
hyperplane.  Adjacency is decided combinatorially (no third ray's tight
set contains the pair's common tight set), with an algebraic rank test
available as an alternative; both are exercised against each other in the
test suite.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from nefcert.divisor_algebra import DomainError, Profile, SymDivisorMg
from nefcert.intersection import EVector, FPartition, enumerate_f_partitions
from nefcert.nef_engine import (
    Certificate,
    EngineConfig,
    certify_nef,
    validate_certificate,
)
from nefcert.pullback import flag_pullback


@dataclass(frozen=True)
class FacetMatrix:
    """One integer row per 4-part partition, columns e_2 .. e_{g//2}."""

    genus: int
    partitions: tuple[FPartition, ...]
    rows: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return self.genus // 2 - 1


def facet_matrix(g: int) -> FacetMatrix:
    """Facet functionals e(i+j)+e(i+k)+e(i+l)-e(i)-e(j)-e(k)-e(l), folded."""
    if g < 4:
        raise DomainError(f"facet matrix needs genus >= 4, got {g}")
    dim = g // 2 - 1
    partitions = tuple(enumerate_f_partitions(g))
    rows = []
    for p in partitions:
        row = [0] * dim
        i, j, k, l = p.parts

        def bump(m: int, delta: int) -> None:
            folded = min(m, g - m)
            if folded >= 2:
                row[folded - 2] += delta

        for m in (i + j, i + k, i + l):
            bump(m, 1)
        for m in (i, j, k, l):
            bump(m, -1)
        rows.append(tuple(row))
    return FacetMatrix(g, partitions, tuple(rows))


@dataclass(frozen=True)
class RaySet:
    """Primitive integer extremal rays, duplicate-free, sorted lexicographically."""

    genus: int
    rays: tuple[EVector, ...]

    def integer_rays(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for ray in self.rays:
            assert all(v.denominator == 1 for v in ray.entries)
            out.append(tuple(int(v) for v in ray.entries))
        return tuple(out)


class ConeNotPointedError(Exception):
    """The facet system admits a nonzero lineality space."""

    def __init__(self, lineality: list[tuple[Fraction, ...]]):
        super().__init__(f"cone is not pointed; lineality dimension {len(lineality)}")
        self.lineality = lineality


# -- exact linear algebra helpers -------------------------------------------


def _row_reduce(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (matrix, pivot column indices)."""
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    cols = len(mat[0]) if mat else 0
    for c in range(cols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = mat[r][c]
        mat[r] = [v / inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                factor = mat[i][c]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def _rank(rows: list[tuple[int, ...]]) -> int:
    if not rows:
        return 0
    _, pivots = _row_reduce([[Fraction(v) for v in r] for r in rows])
    return len(pivots)


def _nullspace(rows: list[tuple[int, ...]], dim: int) -> list[tuple[Fraction, ...]]:
    if not rows:
        return [
            tuple(Fraction(1) if i == j else Fraction(0) for j in range(dim))
            for i in range(dim)
        ]
    mat, pivots = _row_reduce([[Fraction(v) for v in r] for r in rows])
    free = [c for c in range(dim) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * dim
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -mat[r][fc]
        basis.append(tuple(vec))
    return basis


def _primitive(vec) -> tuple[int, ...]:
    """Clear denominators and divide by the content; direction is preserved."""
    fracs = [Fraction(v) for v in vec]
    denom = 1
    for v in fracs:
        denom = denom * v.denominator // gcd(denom, v.denominator)
    ints = [int(v * denom) for v in fracs]
    content = 0
    for v in ints:
        content = gcd(content, abs(v))
    if content == 0:
        raise DomainError("zero vector cannot be normalized")
    return tuple(v // content for v in ints)


def _dot(row: tuple[int, ...], vec: tuple[int, ...]) -> int:
    return sum(r * v for r, v in zip(row, vec))


def extremal_rays(m: FacetMatrix, adjacency: str = "combinatorial") -> RaySet:
    """Enumerate all extremal rays of {e : rows * e >= 0} exactly.

    Raises ConeNotPointedError when the rows have a nontrivial kernel.
    """
    if not m.rows:
        raise DomainError("facet matrix is empty")
    if adjacency not in ("combinatorial", "algebraic"):
        raise DomainError(f"unknown adjacency test {adjacency!r}")
    dim = m.dimension
    kernel = _nullspace(list(m.rows), dim)
    if kernel:
        raise ConeNotPointedError(kernel)

    # Insertion order: fewest nonzero entries first, then lexicographic.
    ordered = sorted(set(m.rows), key=lambda r: (sum(1 for v in r if v != 0), r))

    # Initial simplicial subcone from the first d independent rows.
    initial: list[tuple[int, ...]] = []
    rest: list[tuple[int, ...]] = []
    for row in ordered:
        if len(initial) < dim and _rank(initial + [row]) > len(initial):
            initial.append(row)
        else:
            rest.append(row)
    rays = [_simplicial_ray(initial, j, dim) for j in range(dim)]

    processed: list[tuple[int, ...]] = list(initial)
    masks = [_tight_mask(r, processed) for r in rays]

    for row in rest:
        values = [_dot(row, r) for r in rays]
        keep_idx = [i for i, v in enumerate(values) if v >= 0]
        neg_idx = [i for i, v in enumerate(values) if v < 0]
        new_rays: list[tuple[int, ...]] = []
        if neg_idx:
            for ip in (i for i in keep_idx if values[i] > 0):
                for im in neg_idx:
                    if not _adjacent(ip, im, rays, masks, dim, processed, adjacency):
                        continue
                    combo = tuple(
                        values[ip] * rays[im][t] - values[im] * rays[ip][t]
                        for t in range(dim)
                    )
                    new_rays.append(_primitive(combo))
        processed.append(row)
        bit = 1 << (len(processed) - 1)
        kept_rays = [rays[i] for i in keep_idx]
        kept_masks = [
            masks[i] | (bit if values[i] == 0 else 0) for i in keep_idx
        ]
        seen = set(kept_rays)
        for ray in new_rays:
            if ray in seen:
                continue
            seen.add(ray)
            kept_rays.append(ray)
            kept_masks.append(_tight_mask(ray, processed))
        rays, masks = kept_rays, kept_masks

    ordered_rays = sorted(set(rays))
    evectors = tuple(
        EVector(m.genus, tuple(Fraction(v) for v in ray)) for ray in ordered_rays
    )
    return RaySet(m.genus, evectors)


def _simplicial_ray(rows: list[tuple[int, ...]], j: int, dim: int) -> tuple[int, ...]:
    """Solve rows * x = e_j exactly; the solution spans an initial extremal ray."""
    mat = [[Fraction(v) for v in row] + [Fraction(1 if i == j else 0)] for i, row in enumerate(rows)]
    reduced, pivots = _row_reduce(mat)
    solution = [Fraction(0)] * dim
    for r, pc in enumerate(pivots):
        solution[pc] = reduced[r][dim]
    return _primitive(solution)


def _tight_mask(ray: tuple[int, ...], processed: list[tuple[int, ...]]) -> int:
    mask = 0
    for t, row in enumerate(processed):
        if _dot(row, ray) == 0:
            mask |= 1 << t
    return mask


def _adjacent(
    i: int,
    j: int,
    rays: list[tuple[int, ...]],
    masks: list[int],
    dim: int,
    processed: list[tuple[int, ...]],
    adjacency: str,
) -> bool:
    common = masks[i] & masks[j]
    if common.bit_count() < dim - 2:
        return False
    if adjacency == "algebraic":
        tight = [processed[t] for t in range(len(processed)) if common >> t & 1]
        return _rank(tight) == dim - 2
    for k, mask in enumerate(masks):
        if k != i and k != j and common & ~mask == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Lifting and whole-genus verification
# ---------------------------------------------------------------------------


def lift_to_mg(e: EVector) -> SymDivisorMg:
    """Lift a boundary-basis divisor to the genus-g space so the flag
    pullback recovers it exactly.

    b_1 is the smallest slope making all folded inequalities hold:
    max of 0, (g-1)e(i)/(i(g-i)) and (g-1)(e(i)+e(j)-e(i+j))/(2ij); then
    b_i = i(g-i)b_1/(g-1) - e(i), b_0 = max(b_i)/2 and a = 12b_0 - b_1.
    """
    g = e.genus
    candidates = [Fraction(0)]
    for i in range(1, g):
        candidates.append(Fraction(g - 1, i * (g - i)) * e.e(i))
    for i in range(1, g):
        for j in range(i, g - i):
            candidates.append(
                Fraction(g - 1, 2 * i * j) * (e.e(i) + e.e(j) - e.e(i + j))
            )
    b1 = max(candidates)
    entries = [b1] + [
        Fraction(i * (g - i), g - 1) * b1 - e.e(i) for i in range(2, g // 2 + 1)
    ]
    b0 = max(entries) / 2
    a = 12 * b0 - b1
    return SymDivisorMg(g, a, tuple([b0] + entries))


def flag_pullback_evector(divisor: SymDivisorMg) -> EVector:
    """Express the flag pullback in the boundary basis via
    sum(psi) = sum i(g-i)/(g-1) B_i."""
    g = divisor.genus
    b = divisor.b_vector()
    entries = [
        Fraction(i * (g - i), g - 1) * b.b(1) - b.entries[i - 1]
        for i in range(2, g // 2 + 1)
    ]
    return EVector(g, tuple(entries))


@dataclass
class RayOutcome:
    ray: tuple[int, ...]
    outcome: str  # "certified" | "inconclusive" | "error"
    closer: dict
    node_count: int
    certificate: Certificate | None
    error: str | None = None


@dataclass
class GenusReport:
    genus: int
    rays: RaySet
    outcomes: list[RayOutcome]

    @property
    def all_certified(self) -> bool:
        return all(o.outcome == "certified" for o in self.outcomes)

    def counts(self) -> dict[str, int]:
        out = {"certified": 0, "inconclusive": 0, "error": 0}
        for o in self.outcomes:
            out[o.outcome] += 1
        return out


def _certify_ray(genus: int, ray: tuple[int, ...], config: EngineConfig) -> RayOutcome:
    try:
        e = EVector(genus, tuple(Fraction(v) for v in ray))
        divisor = lift_to_mg(e)
        cert = certify_nef(divisor, config)
        check = validate_certificate(divisor, cert)
        if not check.valid:
            return RayOutcome(ray, "error", {}, 0, cert, f"validation: {check.defect}")
        outcome = "certified" if cert.is_conclusive() else "inconclusive"
        return RayOutcome(ray, outcome, cert.closer(), cert.node_count(), cert)
    except Exception as exc:  # noqa: BLE001 - per-ray isolation is the contract
        return RayOutcome(ray, "error", {}, 0, None, str(exc))


def verify_genus(
    g: int,
    config: EngineConfig | None = None,
    jobs: int = 1,
    rays: RaySet | None = None,
) -> GenusReport:
    """Enumerate, lift, certify and validate every extremal ray of a genus.

    Per-ray failures are reported without aborting the batch.  Outcomes are
    assembled in ray order regardless of the parallelism degree.
    """
    if config is None:
        config = EngineConfig()
    if rays is None:
        rays = extremal_rays(facet_matrix(g))
    integer_rays = rays.integer_rays()
    if jobs > 1 and len(integer_rays) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(
                pool.map(lambda r: _certify_ray(g, r, config), integer_rays)
            )
    else:
        outcomes = [_certify_ray(g, r, config) for r in integer_rays]
    return GenusReport(g, rays, outcomes)
