from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from nefcert import (
    BoundaryClass,
    DomainError,
    Profile,
    SymDivisorMg,
    canonicalize,
    fold_index,
    orbit_multiplicity,
)
from nefcert.divisor_algebra import (
    canonical_classes,
    format_rational,
    parse_rational,
)


def test_fold_examples():
    assert fold_index(3, 5) == 2
    assert fold_index(2, 7) == 2
    assert fold_index(13, 24) == 11


def test_fold_out_of_range():
    with pytest.raises(DomainError):
        fold_index(0, 6)
    with pytest.raises(DomainError):
        fold_index(6, 6)


@given(st.integers(min_value=2, max_value=60), st.data())
def test_fold_properties(g, data):
    m = data.draw(st.integers(min_value=1, max_value=g - 1))
    folded = fold_index(m, g)
    assert 1 <= folded <= g // 2
    assert fold_index(folded, g) == folded
    assert fold_index(g - m, g) == folded


def test_canonicalize_examples():
    p = Profile((2, 1, 1, 1))
    assert canonicalize(p, (2, 1)).side == (1, 1)
    p6 = Profile.all_ones(6)
    assert canonicalize(p6, (1, 1, 1, 1)).side == (1, 1)
    p22 = Profile((2, 2, 1, 1))
    assert canonicalize(p22, (2, 1)).side == (2, 1)


def test_canonicalize_size_errors():
    p = Profile((2, 1, 1, 1))
    with pytest.raises(DomainError):
        canonicalize(p, (2,))
    with pytest.raises(DomainError):
        canonicalize(p, (2, 1, 1))


def _all_sides(profile: Profile):
    n = profile.point_count
    for size in range(2, n - 1):
        for idxs in combinations(range(n), size):
            yield tuple(profile.weights[i] for i in idxs)


@pytest.mark.parametrize(
    "weights",
    [(1,) * 6, (2, 1, 1, 1), (2, 2, 1, 1), (3, 2, 1, 1, 1), (4, 2, 2, 1, 1, 1, 1)],
)
def test_canonicalize_idempotent_and_complement_invariant(weights):
    profile = Profile(weights)
    for side in _all_sides(profile):
        cls = canonicalize(profile, side)
        comp = list(profile.weights)
        for w in side:
            comp.remove(w)
        assert canonicalize(profile, tuple(comp)) == cls
        assert canonicalize(profile, cls.side) == cls


def test_orbit_multiplicity_examples():
    p = Profile((2, 1, 1, 1))
    assert orbit_multiplicity(p, canonicalize(p, (1, 1))) == 3
    p6 = Profile.all_ones(6)
    assert orbit_multiplicity(p6, canonicalize(p6, (1, 1))) == 15
    p22 = Profile((2, 2, 1, 1))
    assert orbit_multiplicity(p22, canonicalize(p22, (2, 1))) == 2


def test_orbit_multiplicity_brute_force():
    for weights in [(1,) * 7, (3, 2, 1, 1, 1), (2, 2, 2, 1, 1), (5, 1, 1, 1, 1)]:
        profile = Profile(weights)
        counted: dict[BoundaryClass, int] = {}
        # Count unordered labelled pairs directly.
        n = profile.point_count
        pairs = set()
        for size in range(2, n - 1):
            for idxs in combinations(range(n), size):
                comp = tuple(sorted(set(range(n)) - set(idxs)))
                pairs.add(frozenset((idxs, comp)))
        for pair in pairs:
            side_idxs = sorted(pair, key=len)[0]
            cls = canonicalize(profile, tuple(profile.weights[i] for i in side_idxs))
            counted[cls] = counted.get(cls, 0) + 1
        for cls in canonical_classes(profile):
            assert orbit_multiplicity(profile, cls) == counted[cls]


@pytest.mark.parametrize("weights", [(1,) * n for n in range(4, 10)] + [(3, 2, 2, 1, 1), (2,) * 5])
def test_orbit_multiplicity_total(weights):
    profile = Profile(weights)
    n = profile.point_count
    total = sum(orbit_multiplicity(profile, c) for c in canonical_classes(profile))
    assert total == (2**n - 2 - 2 * n) // 2


def test_orbit_multiplicity_rejects_noncanonical():
    p = Profile((2, 1, 1, 1))
    with pytest.raises(DomainError):
        orbit_multiplicity(p, BoundaryClass((2, 1)))


@given(
    st.integers(min_value=-10**12, max_value=10**12),
    st.integers(min_value=1, max_value=10**9),
)
def test_rational_round_trip(num, den):
    value = Fraction(num, den)
    assert parse_rational(format_rational(value)) == value


def test_rational_parse_examples():
    assert parse_rational("25/3") == Fraction(25, 3)
    assert parse_rational("-5/6") == Fraction(-5, 6)
    assert parse_rational("0") == 0
    with pytest.raises(DomainError):
        parse_rational("1.5")
    with pytest.raises(DomainError):
        parse_rational("5/-6")


def test_divisor_validation():
    with pytest.raises(DomainError):
        SymDivisorMg(1, Fraction(1), (Fraction(0),))
    with pytest.raises(DomainError):
        SymDivisorMg(6, Fraction(1), (Fraction(0),) * 3)
    d = SymDivisorMg(6, 1, (0, 1, 2, 3))
    assert d.b(4) == 2
    assert d.b(5) == 1


def test_profile_parse_serialize():
    p = Profile.parse("3,2,1,1,1")
    assert p.weights == (3, 2, 1, 1, 1)
    assert p.serialize() == "3,2,1,1,1"
    assert p.genus == 8 and p.a == 2 and p.z == 3
