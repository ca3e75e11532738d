from __future__ import annotations

from fractions import Fraction

import pytest

from octolattice import FLOAT, LOWER, UPPER, Octonion, Region, brute_force_oracle, delta, random_function
from octolattice.errors import DomainError

ORIGIN = (0,) * 8
ALL_UNITS = Octonion([1] * 8)


def test_oracle_delta():
    d = delta(ORIGIN)
    assert brute_force_oracle(d, d, -1) == -2 * ALL_UNITS
    assert brute_force_oracle(d, d, 1).is_zero()


def test_oracle_scales_with_h():
    d = delta(ORIGIN, h=Fraction(1, 2))
    assert brute_force_oracle(d, d, -1) == Fraction(-1, 64) * ALL_UNITS


def test_oracle_float_mode():
    d = delta(ORIGIN, mode=FLOAT)
    value = brute_force_oracle(d, d, -1)
    assert value.close_to(Octonion([-2.0] * 8, FLOAT), 1e-12)


def test_oracle_upper_example():
    g = delta((0,) * 7 + (1,), region=UPPER)
    f = delta(ORIGIN, region=UPPER)
    assert brute_force_oracle(g, f, -1) == Octonion.basis(7)


def test_oracle_region_override():
    box = Region.box((-1,) + (0,) * 6 + (-1,), (1,) + (0,) * 6 + (1,))
    g = random_function(box, 1)
    f = random_function(box, 2)
    whole = brute_force_oracle(g, f, -1)
    upper = brute_force_oracle(g, f, -1, region=UPPER)
    lower = brute_force_oracle(g, f, -1, region=LOWER)
    assert upper != whole and lower != whole


def test_oracle_empty():
    from octolattice import LatticeFunction

    z = LatticeFunction.zero()
    assert brute_force_oracle(z, z, -1).is_zero()


def test_oracle_limits():
    d = delta(ORIGIN)
    with pytest.raises(DomainError):
        brute_force_oracle(d, d, 0)
    with pytest.raises(DomainError):
        brute_force_oracle(d, delta(ORIGIN, mode=FLOAT), -1)
    with pytest.raises(DomainError):
        brute_force_oracle(d, d, -1, region=Region.cube(1))
    with pytest.raises(DomainError):
        brute_force_oracle(d, d, -1, max_sites=10)
