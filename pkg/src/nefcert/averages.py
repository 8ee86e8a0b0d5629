"""Boundary expansions of psi classes and the c-average transform.

A psi class on a genus-0 space can be written as a sum of boundary classes
in several ways, obtained by averaging the elementary identities
psi_i = sum_{S: i in S, j,k not in S} delta_S over different pools of
auxiliary pairs (j, k).  With the points split into the attach part A
(weights >= 2, size a) and the plain part Z (weight 1, size z), the pools
are: both j,k in A (A1), one in A and one in Z (A2), both in Z (A3), and
unrestricted (BIG); Z-points mirror these with the roles of A and Z
exchanged.  Per canonical class with side counts (b, y) = (|S cap A|,
|S cap Z|), the in-side coefficient is the fraction of auxiliary pairs
avoiding S, and the out-of-side coefficient is obtained through the
complement representation of the same class.

The c-average rewrites a psi-form divisor as c*K + (boundary table) by
subtracting c from every psi coefficient, converting c*sum(psi) through
K = sum(psi) - 2*Delta, and expanding each residual psi with a chosen
average.  Every resulting class coefficient is an affine function of c;
the affine table is what the certification engine searches over.

The printed closed forms of the big, second and mixed averages are also
implemented verbatim as cross-check oracles; where a printed form differs
from the validated generic expansion, the generic result governs and the
discrepancy is recorded on the returned table.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from nefcert.divisor_algebra import (
    BoundaryClass,
    BVector,
    DomainError,
    Profile,
    WeightedDivisor,
    canonical_classes,
    side_counts,
)
from nefcert.pullback import restrict


class AverageKind(enum.Enum):
    """Which pool of auxiliary pairs an expansion averages over."""

    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    Z1 = "Z1"
    Z2 = "Z2"
    Z3 = "Z3"
    BIG = "BIG"


#: (kind for A-points, kind for Z-points)
KindPair = tuple[AverageKind, AverageKind]

_A_KINDS = {AverageKind.A1, AverageKind.A2, AverageKind.A3, AverageKind.BIG}
_Z_KINDS = {AverageKind.Z1, AverageKind.Z2, AverageKind.Z3, AverageKind.BIG}


def kind_admissible(profile: Profile, kind: AverageKind, for_a_point: bool) -> bool:
    a, z, n = profile.a, profile.z, profile.point_count
    if for_a_point:
        if kind not in _A_KINDS:
            return False
        return {
            AverageKind.A1: a >= 3,
            AverageKind.A2: a >= 2 and z >= 1,
            AverageKind.A3: z >= 2,
            AverageKind.BIG: n >= 4,
        }[kind]
    if kind not in _Z_KINDS:
        return False
    return {
        AverageKind.Z1: z >= 3,
        AverageKind.Z2: z >= 2 and a >= 1,
        AverageKind.Z3: a >= 2,
        AverageKind.BIG: n >= 4,
    }[kind]


def pair_admissible(profile: Profile, kinds: KindPair) -> bool:
    """A kinds pair is usable when each side with points admits its kind."""
    a_kind, z_kind = kinds
    if profile.point_count < 4:
        return False
    if profile.a > 0 and not kind_admissible(profile, a_kind, for_a_point=True):
        return False
    if profile.z > 0 and not kind_admissible(profile, z_kind, for_a_point=False):
        return False
    return True


def format_kinds(kinds: KindPair) -> str:
    return f"{kinds[0].value}/{kinds[1].value}"


def parse_kinds(text: str) -> KindPair:
    try:
        a_txt, z_txt = text.split("/")
        return (AverageKind(a_txt.strip()), AverageKind(z_txt.strip()))
    except ValueError as exc:
        raise DomainError(f"malformed kinds {text!r}, expected e.g. 'BIG/BIG'") from exc


def psi_coefficient(
    profile: Profile,
    kind: AverageKind,
    point_weight: int,
    cls: BoundaryClass,
    in_side: bool,
) -> Fraction:
    """Per-class coefficient of one point's psi expansion.

    (b, y) are the side counts of the canonical side; a point not in that
    side is handled through the complement representation, which swaps
    (b, y) with (a-b, z-y) in the numerators.
    """
    a, z, n = profile.a, profile.z, profile.point_count
    is_a_point = point_weight >= 2
    if not kind_admissible(profile, kind, for_a_point=is_a_point):
        raise DomainError(
            f"kind {kind.value} inadmissible for "
            f"{'A' if is_a_point else 'Z'}-point on profile {profile.weights}"
        )
    b, y = side_counts(cls)
    if not in_side:
        b, y = a - b, z - y
    if not is_a_point:
        # Z-point rules are the A-rules with (a, b) and (z, y) exchanged.
        a, z = z, a
        b, y = y, b
        kind = {
            AverageKind.Z1: AverageKind.A1,
            AverageKind.Z2: AverageKind.A2,
            AverageKind.Z3: AverageKind.A3,
            AverageKind.BIG: AverageKind.BIG,
        }[kind]
    if kind is AverageKind.A1:
        return Fraction((a - b) * (a - b - 1), (a - 1) * (a - 2))
    if kind is AverageKind.A2:
        return Fraction((a - b) * (z - y), (a - 1) * z)
    if kind is AverageKind.A3:
        return Fraction((z - y) * (z - y - 1), z * (z - 1))
    return Fraction((n - y - b) * (n - y - b - 1), (n - 1) * (n - 2))


@dataclass(frozen=True)
class CAveraged:
    """A divisor in K form: c*K + sum of boundary classes with coefficients.

    `discrepancies` is only populated by the closed-form oracles; it maps a
    class to (closed-form value, generic value) wherever the two differ.
    """

    profile: Profile
    c: Fraction
    boundary_coeffs: dict[BoundaryClass, Fraction]
    kinds: KindPair | None = None
    discrepancies: dict[BoundaryClass, tuple[Fraction, Fraction]] = field(
        default_factory=dict
    )

    @property
    def k_coeff(self) -> Fraction:
        return self.c

    def coeff(self, cls: BoundaryClass) -> Fraction:
        return self.boundary_coeffs[cls]

    def min_coeff(self) -> Fraction:
        return min(self.boundary_coeffs.values())


def affine_coefficient_table(
    wd: WeightedDivisor, kinds: KindPair
) -> dict[BoundaryClass, tuple[Fraction, Fraction]]:
    """Per-class (A_S, B_S) with c-average coefficient A_S + B_S * c.

    For class S: coeff_S(c) = 2c + d_S + sum over points (psi_pt - c) *
    psi_coefficient(pt, S), grouped by weight and side membership, so
    A_S = d_S + sum psi_pt * coef_pt and B_S = 2 - sum coef_pt.
    """
    profile = wd.profile
    if not wd.is_psi_form:
        raise DomainError("c-average input must be in psi form (k_coeff = 0)")
    if not pair_admissible(profile, kinds):
        raise DomainError(
            f"kinds {format_kinds(kinds)} inadmissible on profile {profile.weights}"
        )
    a_kind, z_kind = kinds
    counts = profile.weight_counts()
    table: dict[BoundaryClass, tuple[Fraction, Fraction]] = {}
    for cls in canonical_classes(profile):
        side_count = {w: 0 for w in counts}
        for w in cls.side:
            side_count[w] += 1
        a_const = wd.boundary(cls)
        coef_sum = Fraction(0)
        for w, total in counts.items():
            kind = a_kind if w >= 2 else z_kind
            c_in = psi_coefficient(profile, kind, w, cls, in_side=True)
            c_out = psi_coefficient(profile, kind, w, cls, in_side=False)
            spread = side_count[w] * c_in + (total - side_count[w]) * c_out
            a_const += wd.psi(w) * spread
            coef_sum += spread
        table[cls] = (a_const, 2 - coef_sum)
    return table


def c_average(wd: WeightedDivisor, c, kinds: KindPair) -> CAveraged:
    """Rewrite a psi-form divisor as c*K + boundary table via the given kinds."""
    c = Fraction(c)
    if c < 0:
        raise DomainError(f"c must be >= 0, got {c}")
    table = affine_coefficient_table(wd, kinds)
    coeffs = {cls: a_s + b_s * c for cls, (a_s, b_s) in table.items()}
    return CAveraged(wd.profile, c, coeffs, kinds=kinds)


def _compare_with_generic(
    profile: Profile,
    c: Fraction,
    closed: dict[BoundaryClass, Fraction],
    generic: CAveraged,
    kinds: KindPair,
) -> CAveraged:
    discrepancies = {
        cls: (closed[cls], generic.boundary_coeffs[cls])
        for cls in closed
        if closed[cls] != generic.boundary_coeffs[cls]
    }
    return CAveraged(profile, c, closed, kinds=kinds, discrepancies=discrepancies)


def big_c_average_closed(b: BVector, profile: Profile, c) -> CAveraged:
    """The big average's closed form, evaluated verbatim with folded subscripts.

    Coefficient of a class with side counts (b, y):
    f_{y,b}(b_1 - c) + g_{y,b} sum_{i in B}(b_{n_i} - c)
    + h_{y,b} sum_{i in B^c}(b_{n_i} - c) + 2c - b_{weight(S)},
    with g = (N-y-b)(N-y-b-1)/((N-1)(N-2)), h = (y+b)(y+b-1)/((N-1)(N-2)),
    f = y*g + (z-y)*h.  Must equal the generic BIG/BIG c-average exactly.
    """
    c = Fraction(c)
    n = profile.point_count
    if n < 4:
        raise DomainError(f"big average needs N >= 4, got {n}")
    if profile.genus != b.genus:
        raise DomainError("profile genus does not match b-vector genus")
    z = profile.z
    b1 = b.b(1)
    den = (n - 1) * (n - 2)
    closed: dict[BoundaryClass, Fraction] = {}
    for cls in canonical_classes(profile):
        bb, y = side_counts(cls)
        g_yb = Fraction((n - y - bb) * (n - y - bb - 1), den)
        h_yb = Fraction((y + bb) * (y + bb - 1), den)
        f_yb = y * g_yb + (z - y) * h_yb
        sum_in = sum((b.b(w) - c for w in cls.side if w >= 2), Fraction(0))
        comp = _profile_complement_weights(profile, cls)
        sum_out = sum((b.b(w) - c for w in comp if w >= 2), Fraction(0))
        closed[cls] = (
            f_yb * (b1 - c) + g_yb * sum_in + h_yb * sum_out + 2 * c - b.b(cls.weight)
        )
    kinds = (AverageKind.BIG, AverageKind.BIG)
    generic = c_average(restrict(b, profile), c, kinds)
    return _compare_with_generic(profile, c, closed, generic, kinds)


def second_c_average_closed(b: BVector, profile: Profile, c) -> CAveraged:
    """The second average's printed closed form (A2 for A-points, Z2 for Z).

    The printed Z-point term (b_1-c)((a-b)(z-y)+by)/(a(z-1)) differs from the
    directly derived A2/Z2 expansion, which gives y(z-y)(b_1-c)/(z-1); the
    difference is surfaced per class in `discrepancies`.
    """
    c = Fraction(c)
    a, z = profile.a, profile.z
    if a < 2 or z < 2:
        raise DomainError(f"second average needs a >= 2 and z >= 2, got a={a}, z={z}")
    if profile.genus != b.genus:
        raise DomainError("profile genus does not match b-vector genus")
    b1 = b.b(1)
    closed: dict[BoundaryClass, Fraction] = {}
    for cls in canonical_classes(profile):
        bb, y = side_counts(cls)
        sum_in = sum((b.b(w) - c for w in cls.side if w >= 2), Fraction(0))
        comp = _profile_complement_weights(profile, cls)
        sum_out = sum((b.b(w) - c for w in comp if w >= 2), Fraction(0))
        closed[cls] = (
            Fraction((a - bb) * (z - y), 1) * sum_in / ((a - 1) * z)
            + Fraction(bb * y, 1) * sum_out / ((a - 1) * z)
            + (b1 - c) * Fraction((a - bb) * (z - y) + bb * y, a * (z - 1))
            + 2 * c
            - b.b(cls.weight)
        )
    kinds = (AverageKind.A2, AverageKind.Z2)
    generic = c_average(restrict(b, profile), c, kinds)
    return _compare_with_generic(profile, c, closed, generic, kinds)


def mixed_c_average_closed(b: BVector, profile: Profile, c) -> CAveraged:
    """The printed mixed closed form (A2 for A-points, BIG for Z-points).

    The display gives the coefficient of each class, after multiplying the
    overall c back through, as c*n(alpha)/d(alpha) + n(beta)/d(beta).  It is
    compared per class against the generic A2/BIG expansion and differences
    are recorded (the printed form omits the boundary subtraction term).
    """
    c = Fraction(c)
    a, z, n = profile.a, profile.z, profile.point_count
    if a < 2 or z < 1 or n < 4:
        raise DomainError(
            f"mixed average needs a >= 2, z >= 1, N >= 4, got a={a}, z={z}, N={n}"
        )
    if c == 0:
        raise DomainError("mixed closed form divides by c; c must be positive")
    if profile.genus != b.genus:
        raise DomainError("profile genus does not match b-vector genus")
    b1 = b.b(1)
    d_alpha = (a - 1) * (n - 1) * (n - 2)
    d_beta = (n - 1) * (n - 2) * (a - 1) * z
    closed: dict[BoundaryClass, Fraction] = {}
    for cls in canonical_classes(profile):
        bb, y = side_counts(cls)
        mirror = (n - y - bb) * (n - y - bb - 1) * y + (y + bb) * (y + bb - 1) * (z - y)
        n_alpha = (n - 1) * (n - 2) * (2 * (a - 1) - bb * (a - bb)) - (a - 1) * mirror
        sum_in = sum((b.b(w) for w in cls.side if w >= 2), Fraction(0))
        comp = _profile_complement_weights(profile, cls)
        sum_out = sum((b.b(w) for w in comp if w >= 2), Fraction(0))
        n_beta = (n - 1) * (n - 2) * (
            (z - y) * (a - bb) * sum_in + y * bb * sum_out
        ) + b1 * (a - 1) * z * mirror
        closed[cls] = c * Fraction(n_alpha, d_alpha) + n_beta / Fraction(d_beta)
    kinds = (AverageKind.A2, AverageKind.BIG)
    generic = c_average(restrict(b, profile), c, kinds)
    return _compare_with_generic(profile, c, closed, generic, kinds)


def _profile_complement_weights(profile: Profile, cls: BoundaryClass) -> tuple[int, ...]:
    from nefcert.divisor_algebra import _complement_side

    return _complement_side(profile, cls.side)
