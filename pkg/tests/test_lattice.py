from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from octolattice import (
    EXACT,
    FLOAT,
    LOWER,
    UPPER,
    WHOLE,
    LatticeFunction,
    Octonion,
    Region,
    delta,
    linear,
    linear_combination,
    random_function,
)
from octolattice.errors import DomainError, ParseError
from octolattice.lattice import format_function, parse_function, read_function, unit, write_function

ORIGIN = (0,) * 8
E = [Octonion.basis(i) for i in range(8)]


def test_delta_value_and_support():
    d = delta(ORIGIN, value=E[3])
    assert d.value(ORIGIN) == E[3]
    assert d[(1, 0, 0, 0, 0, 0, 0, 0)] == Octonion.zero()
    assert d.support() == [ORIGIN]
    assert len(d) == 1


def test_zero_function():
    z = LatticeFunction.zero()
    assert z.is_zero() and len(z) == 0
    assert z.value(ORIGIN).is_zero()


def test_linear_values():
    box = Region.cube(1)
    f = linear(1, E[0], box, h=Fraction(1, 2))
    assert f.value((0, 1, 0, 0, 0, 0, 0, 0)) == Octonion.real(Fraction(1, 2))
    assert f.value((0, -1, 0, 0, 0, 0, 0, 0)) == Octonion.real(Fraction(-1, 2))
    assert f.value(ORIGIN).is_zero()
    # zero values are not stored
    assert len(f) == 2 * 3**7


def test_linear_combination_matches_difference():
    box = Region.cube(1)
    a = linear_combination([(1, E[0]), (2, -E[4])], box)
    b = linear(1, E[0], box) - linear(2, E[4], box)
    assert a == b


def test_linear_combination_float_mode():
    box = Region.cube(1)
    f = linear_combination([(3, Octonion.basis(2, FLOAT))], box, h=0.5)
    assert f.value((0, 0, 0, 1, 0, 0, 0, 0)) == Octonion([0, 0, 0.5, 0, 0, 0, 0, 0], FLOAT)


def test_linear_requires_box():
    with pytest.raises(DomainError):
        linear(1, E[0], WHOLE)
    with pytest.raises(DomainError):
        linear(8, E[0], Region.cube(1))


def test_random_function_is_seeded():
    box = Region.cube(1)
    assert random_function(box, 5) == random_function(box, 5)
    assert random_function(box, 5) != random_function(box, 6)
    f = random_function(box, 5, mode=FLOAT)
    assert f.mode == FLOAT and np.abs(f.coeff_array).max() < 1


def test_random_function_respects_region():
    box = Region.cube(1)
    f = random_function(box, 0, region=UPPER)
    assert (f.sites[:, 7] >= 0).all()
    g = random_function(box, 0, region=LOWER)
    assert (g.sites[:, 7] <= 0).all()


def test_outside_region_rejected():
    with pytest.raises(DomainError):
        delta((0,) * 7 + (-1,), region=UPPER)
    with pytest.raises(DomainError):
        delta((2,) + (0,) * 7, region=Region.cube(1))


def test_mixed_operands_rejected():
    a = delta(ORIGIN)
    with pytest.raises(DomainError):
        a + delta(ORIGIN, mode=FLOAT)
    with pytest.raises(DomainError):
        a + delta(ORIGIN, h=2)
    with pytest.raises(DomainError):
        a + delta(ORIGIN, region=UPPER)


def test_arithmetic_cancels_to_zero():
    f = random_function(Region.cube(1), 3)
    assert (f - f).is_zero()
    assert f + (-f) == LatticeFunction.zero()
    assert (f + f) == f.scaled(2)


def test_scalar_and_octonion_multiplication():
    f = delta(ORIGIN, value=E[1])
    assert (f * E[2]).value(ORIGIN) == E[4]
    assert (E[2] * f).value(ORIGIN) == -E[4]
    assert (f * Fraction(1, 3)).value(ORIGIN) == Fraction(1, 3) * E[1]


def test_raw_constructor_sums_repeated_sites():
    f = LatticeFunction(1, WHOLE, EXACT, np.zeros((2, 8), dtype=np.int64), np.ones((2, 8), dtype=np.int64))
    assert len(f) == 1
    assert f.value(ORIGIN) == Octonion([2] * 8)


def test_canonical_storage_is_unique():
    a = delta(ORIGIN, value=Fraction(2, 3) * E[0]) + delta(ORIGIN, value=Fraction(1, 3) * E[0])
    b = delta(ORIGIN)
    assert a == b
    assert a.scale == b.scale == 1


def test_large_values_promote_to_python_ints():
    big = Octonion([2**61] * 8)
    f = delta(ORIGIN, value=big) + delta(unit(0), value=big)
    g = f.scaled(1) + f
    assert g.value(ORIGIN) == Fraction(2) * big


@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(-9, 9)), min_size=1, max_size=20))
def test_sum_of_deltas_is_order_independent(entries):
    parts = [delta((x,) + (0,) * 7, value=c * E[0]) for x, c in entries]
    fwd = LatticeFunction.zero()
    for p in parts:
        fwd = fwd + p
    rev = LatticeFunction.zero()
    for p in reversed(parts):
        rev = rev + p
    assert fwd == rev
    for x in {x for x, _ in entries}:
        total = sum(c for y, c in entries if y == x)
        assert fwd.value((x,) + (0,) * 7) == total * E[0]


@pytest.mark.parametrize("region", [WHOLE, UPPER, LOWER, Region.cube(2)])
def test_region_text_round_trip(region):
    assert Region.parse(str(region)) == region


def test_region_interior_masks():
    sites = np.array([ORIGIN, (0,) * 7 + (1,), (0,) * 7 + (-1,), (1,) * 8], dtype=np.int64)
    assert UPPER.interior(sites).tolist() == [False, True, False, True]
    assert LOWER.interior(sites).tolist() == [False, False, True, False]
    box = Region.cube(1)
    assert box.interior(sites).tolist() == [True, False, False, False]
    assert box.admits(sites).all()
    assert Region.cube(1).interior_box() == Region.cube(0)
    assert Region.cube(0).interior_box() is None


def test_box_sites_lexicographic():
    box = Region.box((0,) * 8, (1,) + (0,) * 6 + (2,))
    s = box.sites()
    assert len(s) == box.size() == 6
    assert [tuple(r) for r in s] == sorted(tuple(r) for r in s)


@pytest.mark.parametrize("mode", [EXACT, FLOAT])
def test_file_round_trip(tmp_path, mode):
    h = Fraction(1, 3) if mode == EXACT else 0.25
    f = random_function(Region.cube(1), 11, h=h, mode=mode, region=UPPER)
    path = tmp_path / "f.fn"
    write_function(path, f)
    assert read_function(path) == f


def test_file_comments_and_blank_lines():
    text = "# g\nh=1 region=whole mode=exact\n\n0 0 0 0 0 0 0 0 : 1/2 0 0 0 0 0 0 -3  # unused\n"
    with pytest.raises(ParseError):
        parse_function(text)
    text = "# g\nh=1 region=whole mode=exact\n\n# site\n0 0 0 0 0 0 0 0 : 1/2 0 0 0 0 0 0 -3\n"
    f = parse_function(text)
    assert f.value(ORIGIN) == Octonion([Fraction(1, 2), 0, 0, 0, 0, 0, 0, -3])


@pytest.mark.parametrize("body,line", [
    ("h=1 region=whole mode=exact\n0 0 0 0 0 0 0 : 1 0 0 0 0 0 0 0\n", 2),
    ("h=1 region=whole mode=exact\n0 0 0 0 0 0 0 0 : 2/4 0 0 0 0 0 0 0\n", 2),
    ("h=1 region=whole mode=exact\n0 0 0 0 0 0 0 0 : 1 0 0 0 0 0 0 0\n0 0 0 0 0 0 0 0 : 1 0 0 0 0 0 0 0\n", 3),
    ("h=1 region=upper mode=exact\n0 0 0 0 0 0 0 -1 : 1 0 0 0 0 0 0 0\n", 2),
    ("h=1 region=nowhere mode=exact\n", 1),
    ("h=0 region=whole mode=exact\n", None),
])
def test_parse_errors_name_the_line(body, line):
    with pytest.raises((ParseError, DomainError)) as info:
        parse_function(body)
    if line is not None:
        assert f"line {line}" in str(info.value)


def test_format_is_canonical():
    f = delta(ORIGIN, value=E[1]) + delta(unit(7), value=E[2])
    text = format_function(f)
    assert text.splitlines()[0] == "h=1 region=whole mode=exact"
    assert parse_function(text) == f
    assert format_function(parse_function(text)) == text
