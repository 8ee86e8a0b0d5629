from __future__ import annotations

import random
from fractions import Fraction

import pytest

from nefcert import BVector, EVector, SymDivisorMg, lift_to_mg
from nefcert.cone_enum import extremal_rays, facet_matrix


def random_fraction(rng: random.Random, lo: int = -4, hi: int = 8, den: int = 6) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def random_f_divisor(rng: random.Random, g: int) -> SymDivisorMg:
    """A random divisor passing the F-inequalities.

    Built as a random nonnegative combination of lifted extremal rays, with
    b_0 and the lambda coefficient padded upward; such divisors pass the
    inequality check by construction.
    """
    rays = extremal_rays(facet_matrix(g)).rays
    entries = [Fraction(0)] * (g // 2 - 1)
    for ray in rays:
        scale = Fraction(rng.randint(0, 4), rng.randint(1, 3))
        entries = [x + scale * v for x, v in zip(entries, ray.entries)]
    lifted = lift_to_mg(EVector(g, tuple(entries)))
    pad_b0 = Fraction(rng.randint(0, 3), rng.randint(1, 4))
    pad_a = Fraction(rng.randint(0, 5), rng.randint(1, 3))
    b0 = lifted.b0 + pad_b0
    return SymDivisorMg(
        g,
        12 * b0 - lifted.delta_coeffs[1] + pad_a,
        (b0,) + lifted.delta_coeffs[1:],
    )


def random_b_vector(rng: random.Random, g: int) -> BVector:
    return BVector(g, tuple(random_fraction(rng, 0, 8) for _ in range(g // 2)))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240811)
