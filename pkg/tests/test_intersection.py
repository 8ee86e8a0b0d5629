from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from nefcert import (
    EVector,
    FPartition,
    LabelledExpression,
    LabelledFCurve,
    SymDivisorMg,
    check_f_divisor_mg,
    enumerate_f_partitions,
    f_intersection_sym_e,
    labelled_intersection,
    lift_to_mg,
)
from nefcert.cone_enum import flag_pullback_evector
from nefcert.divisor_algebra import DomainError
from nefcert.intersection import all_f_curves, expressions_agree_on_curves
from tests.conftest import random_f_divisor


def test_enumerate_examples():
    assert [p.parts for p in enumerate_f_partitions(4)] == [(1, 1, 1, 1)]
    assert [p.parts for p in enumerate_f_partitions(6)] == [(1, 1, 1, 3), (1, 1, 2, 2)]
    assert [p.parts for p in enumerate_f_partitions(8)] == [
        (1, 1, 1, 5),
        (1, 1, 2, 4),
        (1, 1, 3, 3),
        (1, 2, 2, 3),
        (2, 2, 2, 2),
    ]
    assert enumerate_f_partitions(3) == []


def test_enumeration_is_exhaustive_and_sorted():
    for g in range(4, 16):
        parts = [p.parts for p in enumerate_f_partitions(g)]
        assert parts == sorted(parts)
        brute = sorted(
            {
                tuple(sorted((i, j, k, g - i - j - k)))
                for i in range(1, g)
                for j in range(1, g)
                for k in range(1, g)
                if g - i - j - k >= 1
            }
        )
        assert parts == brute


def test_f_intersection_examples():
    e = EVector(6, (Fraction(1), Fraction(3)))
    assert f_intersection_sym_e(e, FPartition((1, 1, 1, 3))) == 0
    assert f_intersection_sym_e(e, FPartition((1, 1, 2, 2))) == 5
    e2 = EVector(6, (Fraction(2), Fraction(1)))
    assert f_intersection_sym_e(e2, FPartition((1, 1, 2, 2))) == 0


def test_f_intersection_genus_mismatch():
    e = EVector(6, (Fraction(1), Fraction(3)))
    with pytest.raises(DomainError):
        f_intersection_sym_e(e, FPartition((1, 1, 1, 5)))


def test_f_intersection_part_permutation_invariant(rng):
    for _ in range(50):
        g = rng.randint(5, 14)
        entries = tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(g // 2 - 1))
        e = EVector(g, entries)
        parts = rng.choice(enumerate_f_partitions(g)).parts
        values = set()
        for perm in permutations(parts):
            i, j, k, l = perm
            values.add(
                e.e(i + j) + e.e(i + k) + e.e(i + l) - e.e(i) - e.e(j) - e.e(k) - e.e(l)
            )
        assert len(values) == 1


def test_check_f_divisor_examples():
    lam = SymDivisorMg(6, 1, (0, 0, 0, 0))
    assert check_f_divisor_mg(lam) == []
    d0 = SymDivisorMg(6, 12, (1, 0, 0, 0))
    assert check_f_divisor_mg(d0) == []
    bad = SymDivisorMg(6, 11, (1, 0, 0, 0))
    violations = check_f_divisor_mg(bad)
    assert [v.family for v in violations] == [1]
    assert violations[0].value == -1


def test_check_f_divisor_reports_each_family():
    # family 2 via negative b_2, family 3 via b_1 > 2 b_0, etc.
    d = SymDivisorMg(8, 100, (1, 3, -1, 0, 0))
    families = {v.family for v in check_f_divisor_mg(d)}
    assert 2 in families and 3 in families


def test_km_bound_follows_from_f_check(rng):
    for g in range(4, 13):
        for _ in range(20):
            d = random_f_divisor(rng, g)
            assert check_f_divisor_mg(d) == []
            b = d.b_vector()
            for i in range(1, g):
                assert (g - 1) * b.b(i) <= i * (g - i) * b.b(1)


def test_labelled_intersection_examples():
    curve4 = LabelledFCurve((frozenset({1}), frozenset({2}), frozenset({3}), frozenset({4})))
    expr = LabelledExpression(4).add_delta({1, 2}, 1)
    assert labelled_intersection(expr, curve4) == 1

    curve5 = LabelledFCurve(
        (frozenset({1, 2}), frozenset({3}), frozenset({4}), frozenset({5}))
    )
    expr5 = LabelledExpression(5).add_delta({1, 2}, 1)
    assert labelled_intersection(expr5, curve5) == -1

    k4 = LabelledExpression(4).add_k(1)
    assert labelled_intersection(k4, curve4) == -2


def _k_expression(n: int) -> LabelledExpression:
    from itertools import combinations

    expr = LabelledExpression(n)
    for i in range(1, n + 1):
        expr.add_psi(i, 1)
    # Delta = each boundary class once; enumerate canonical labelled sides.
    seen = set()
    for size in range(2, n - 1):
        for side in combinations(range(1, n + 1), size):
            s = frozenset(side)
            comp = frozenset(range(1, n + 1)) - s
            key = min(
                (len(s), tuple(sorted(s))), (len(comp), tuple(sorted(comp)))
            )
            if key in seen:
                continue
            seen.add(key)
            expr.add_delta(s, -2)
    return expr


@pytest.mark.parametrize("n", range(4, 9))
def test_k_identity_oracle(n):
    """K = sum(psi) - 2*Delta intersects every curve as 2 - #singletons."""
    lhs = LabelledExpression(n).add_k(1)
    rhs = _k_expression(n)
    assert expressions_agree_on_curves(lhs, rhs)
    for curve in all_f_curves(n):
        singles = sum(1 for b in curve.blocks if len(b) == 1)
        assert labelled_intersection(lhs, curve) == 2 - singles


def test_curve_count_small():
    # Stirling numbers of the second kind S(n, 4)
    expected = {4: 1, 5: 10, 6: 65, 7: 350, 8: 1701}
    for n, count in expected.items():
        assert sum(1 for _ in all_f_curves(n)) == count


def test_facet_test_agrees_with_divisor_inequality(rng):
    """Boundary-basis facet values equal the family-5 values of the lift."""
    for g in range(4, 25):
        for _ in range(10):
            entries = tuple(
                Fraction(rng.randint(0, 6), rng.randint(1, 3)) for _ in range(g // 2 - 1)
            )
            e = EVector(g, entries)
            d = lift_to_mg(e)
            assert flag_pullback_evector(d).entries == e.entries
            b = d.b_vector()
            for p in enumerate_f_partitions(g):
                i, j, k, l = p.parts
                item5 = (
                    b.b(i) + b.b(j) + b.b(k) + b.b(l)
                    - b.b(i + j) - b.b(i + k) - b.b(i + l)
                )
                assert item5 == f_intersection_sym_e(e, p)
