from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import pytest

from nefcert import (
    BoundaryClass,
    BVector,
    Profile,
    SymDivisorMg,
    canonicalize,
    check_f_divisor_mg,
    child_profiles,
    flag_pullback,
    restrict,
)
from nefcert.divisor_algebra import DomainError, canonical_classes
from nefcert.intersection import (
    LabelledExpression,
    all_f_curves,
    f_inequality_value,
    labelled_intersection,
)
from nefcert.nef_engine import _four_block_weight_sums, restriction_is_f_positive
from tests.conftest import random_f_divisor


def integer_partitions(n: int, max_part: int | None = None):
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def test_flag_pullback_example_g6():
    d = SymDivisorMg(6, Fraction(25, 3), (Fraction(5, 6), Fraction(5, 3), Fraction(5, 3), 0))
    wd = flag_pullback(d)
    assert wd.profile == Profile.all_ones(6)
    assert wd.psi_coeffs == {1: Fraction(5, 3)}
    assert wd.k_coeff == 0
    assert wd.boundary_coeffs == {
        BoundaryClass((1, 1)): Fraction(-5, 3),
        BoundaryClass((1, 1, 1)): Fraction(0),
    }


def test_flag_pullback_lambda_and_small_genus():
    assert flag_pullback(SymDivisorMg(6, 1, (0, 0, 0, 0))).is_zero()
    d5 = SymDivisorMg(5, 0, (0, 1, 1))
    wd = flag_pullback(d5)
    assert wd.psi_coeffs == {1: 1}
    assert wd.boundary_coeffs == {BoundaryClass((1, 1)): -1}
    with pytest.raises(DomainError):
        flag_pullback(SymDivisorMg(3, 1, (0, 0)))


def test_restrict_example_g5():
    b = BVector(5, (Fraction(3), Fraction(7)))
    wd = restrict(b, Profile((2, 1, 1, 1)))
    assert wd.psi_coeffs == {1: 3, 2: 7}
    # The one canonical class {1,1} (weight 2; its complement {2,1} has
    # weight 3 and fold(3,5)=2) carries -b_2 and is realized 3 times.
    assert wd.boundary_coeffs == {BoundaryClass((1, 1)): -7}


def test_restrict_all_ones_matches_flag_pullback(rng):
    for g in range(4, 11):
        d = random_f_divisor(rng, g)
        wd = flag_pullback(d)
        wd2 = restrict(d.b_vector(), Profile.all_ones(g))
        assert wd.psi_coeffs == wd2.psi_coeffs
        assert wd.boundary_coeffs == wd2.boundary_coeffs


def test_restrict_point_space_is_zero():
    b = BVector(6, (1, 2, 3))
    assert restrict(b, Profile((3, 2, 1))).is_zero()


def test_restrict_genus_mismatch():
    with pytest.raises(DomainError):
        restrict(BVector(6, (1, 2, 3)), Profile((2, 1, 1, 1)))


def test_child_profiles_examples():
    p10 = Profile.all_ones(10)
    cls = canonicalize(p10, (1, 1, 1))
    assert child_profiles(p10, cls) == (
        Profile((3, 1, 1, 1, 1, 1, 1, 1)),
        Profile((7, 1, 1, 1)),
    )
    p = Profile((3,) + (1,) * 7)
    cls = canonicalize(p, (3, 1))
    assert child_profiles(p, cls) == (Profile((4, 1, 1, 1, 1, 1, 1)), Profile((6, 3, 1)))
    p22 = Profile((2, 2, 1, 1))
    cls = canonicalize(p22, (2, 1))
    assert child_profiles(p22, cls) == (Profile((3, 2, 1)), Profile((3, 2, 1)))


def test_child_profiles_shrink():
    for weights in [(1,) * 9, (4, 2, 1, 1, 1, 1), (3, 3, 2, 1, 1)]:
        profile = Profile(weights)
        n = profile.point_count
        for cls in canonical_classes(profile):
            first, second = child_profiles(profile, cls)
            assert first.genus == profile.genus == second.genus
            assert first.point_count == n - cls.size + 1 < n
            assert second.point_count == n - (n - cls.size) + 1 < n


def _labelled_form(b: BVector, profile: Profile) -> LabelledExpression:
    """Expand the restriction over labelled points and labelled classes."""
    n = profile.point_count
    expr = LabelledExpression(n)
    for idx, w in enumerate(profile.weights, start=1):
        expr.add_psi(idx, b.b(w))
    seen = set()
    for size in range(2, n - 1):
        for side in combinations(range(1, n + 1), size):
            s = frozenset(side)
            comp = frozenset(range(1, n + 1)) - s
            key = min((len(s), tuple(sorted(s))), (len(comp), tuple(sorted(comp))))
            if key in seen:
                continue
            seen.add(key)
            weight = sum(profile.weights[i - 1] for i in side)
            expr.add_delta(s, -b.b(weight))
    return expr


def test_restriction_intersects_curves_by_block_weight(rng):
    """Labelled intersection of the restriction equals the family-5 value on
    the blocks' weight sums, for every 4-block curve."""
    for weights in [(1,) * 6, (2, 1, 1, 1), (3, 2, 1, 1, 1), (2, 2, 2, 1, 1)]:
        profile = Profile(weights)
        g = profile.genus
        b = BVector(g, tuple(Fraction(rng.randint(0, 9), rng.randint(1, 3)) for _ in range(g // 2)))
        expr = _labelled_form(b, profile)
        for curve in all_f_curves(profile.point_count):
            sums = tuple(
                sorted(sum(profile.weights[i - 1] for i in block) for block in curve.blocks)
            )
            assert f_inequality_value(b, sums) == labelled_intersection(expr, curve)


def test_f_preservation_exhaustive():
    """F input implies nonnegative intersection with every weighted boundary
    curve, over every profile of genus <= 10."""
    import random

    rng = random.Random(7)
    for g in range(4, 11):
        divisors = [random_f_divisor(rng, g) for _ in range(5)]
        for d in divisors:
            assert check_f_divisor_mg(d) == []
        for weights in integer_partitions(g):
            profile = Profile(weights)
            if profile.point_count < 4:
                continue
            for d in divisors:
                b = d.b_vector()
                assert restriction_is_f_positive(b, profile)
                for sums in _four_block_weight_sums(profile.weights):
                    assert f_inequality_value(b, sums) >= 0
