"""Flag-map and boundary-restriction pullbacks onto weighted profiles."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

from nefcert.divisor_algebra import (
    BoundaryClass,
    BVector,
    DomainError,
    Profile,
    SymDivisorMg,
    WeightedDivisor,
    _complement_side,
    canonical_classes,
    canonicalize,
)


def flag_pullback(divisor: SymDivisorMg) -> WeightedDivisor:
    """Pull back along the flag map: b_1 * sum psi_i - sum_{i>=2} b_i B_i.

    Result lives on the all-ones profile in psi form.  The lambda and b_0
    parts of the input vanish.
    """
    g = divisor.genus
    if g < 4:
        raise DomainError(f"flag target for genus {g} is a trivial space")
    profile = Profile.all_ones(g)
    b = divisor.b_vector()
    boundary = {
        BoundaryClass((1,) * i): -b.entries[i - 1] for i in range(2, g // 2 + 1)
    }
    return WeightedDivisor(profile, {1: b.entries[0]}, Fraction(0), boundary)


def restrict(b: BVector, profile: Profile) -> WeightedDivisor:
    """Restrict a flag divisor to a weighted profile, in psi form.

    Each point of weight w gets psi coefficient b(w); each canonical boundary
    class S gets coefficient -b(weight(S)), accumulated once per class.
    """
    if profile.genus != b.genus:
        raise DomainError(
            f"profile genus {profile.genus} does not match b-vector genus {b.genus}"
        )
    if profile.point_count <= 3:
        return WeightedDivisor.zero(profile)
    psi = {w: b.b(w) for w in set(profile.weights)}
    boundary = {cls: -b.b(cls.weight) for cls in canonical_classes(profile)}
    return WeightedDivisor(profile, psi, Fraction(0), boundary)


def child_profiles(profile: Profile, cls: BoundaryClass) -> tuple[Profile, Profile]:
    """The two profiles obtained by contracting a boundary class's sides.

    The first child merges the canonical side into one attach point of its
    total weight, keeping the complement's points; the second does the same
    with the roles swapped.  Both have the parent's genus and fewer points.
    """
    if canonicalize(profile, cls.side) != cls:
        raise DomainError(f"class {cls.side} is not canonical on {profile.weights}")
    comp = _complement_side(profile, cls.side)
    first = Profile((sum(cls.side),) + comp)
    second = Profile((sum(comp),) + cls.side)
    return first, second
