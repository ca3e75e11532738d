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
    linear_combination,
    mul,
    random_function,
)
from octolattice.errors import DomainError
from octolattice.lattice import unit
from octolattice.operators import (
    LEFT_BACKWARD,
    LEFT_FORWARD,
    RIGHT_BACKWARD,
    RIGHT_FORWARD,
    OperatorVariant,
    apply_cr,
    backward_diff,
    factorization_residual,
    forward_diff,
    is_monogenic,
    star_laplacian,
)

ORIGIN = (0,) * 8
E = [Octonion.basis(i) for i in range(8)]


def shifted(site, axis, step):
    s = list(site)
    s[axis] += step
    return tuple(s)


def pointwise_cr(f, site, v):
    """Cauchy-Riemann operator at one site, straight from the definition."""
    total = Octonion.zero(f.mode)
    for j in range(8):
        if v.direction == "forward":
            d = f.value(shifted(site, j, 1)) - f.value(site)
        else:
            d = f.value(site) - f.value(shifted(site, j, -1))
        unit_j = E[j] if f.mode == EXACT else Octonion.basis(j, f.mode)
        if v.conjugated and j:
            unit_j = -unit_j
        total = total + (mul(unit_j, d) if v.side == "left" else mul(d, unit_j))
    return total * (1 / f.h if f.mode == FLOAT else 1 / Fraction(f.h))


def test_forward_backward_on_delta():
    d = delta(ORIGIN, h=Fraction(1, 2))
    fd = forward_diff(d, 3)
    assert fd.value(ORIGIN) == -2 * E[0]
    assert fd.value(shifted(ORIGIN, 3, -1)) == 2 * E[0]
    assert len(fd) == 2
    bd = backward_diff(d, 3)
    assert bd.value(ORIGIN) == 2 * E[0]
    assert bd.value(shifted(ORIGIN, 3, 1)) == -2 * E[0]


@pytest.mark.parametrize("v", [LEFT_FORWARD, LEFT_BACKWARD, RIGHT_FORWARD, RIGHT_BACKWARD,
                               OperatorVariant("backward", "left", conjugated=True),
                               OperatorVariant("forward", "right", conjugated=True)])
def test_cr_matches_pointwise_definition(v):
    f = random_function(Region.cube(1), 4, h=Fraction(2, 3))
    out = apply_cr(f, v)
    sites = {tuple(s) for s in out.sites.tolist()} | {(0,) * 8, (1,) * 8, (2,) + (0,) * 7}
    for site in sorted(sites)[:200]:
        assert out.value(site) == pointwise_cr(f, site, v)


def test_cr_on_delta_left_backward():
    d = delta(ORIGIN)
    out = apply_cr(d, LEFT_BACKWARD)
    assert out.value(ORIGIN) == sum((E[j] for j in range(1, 8)), E[0])
    for j in range(8):
        assert out.value(unit(j)) == -E[j]


@given(st.integers(0, 2**32), st.integers(0, 2**32), st.integers(-3, 3))
def test_cr_is_linear(s1, s2, lam):
    box = Region.cube(1)
    f, g = random_function(box, s1), random_function(box, s2)
    lhs = apply_cr(f.scaled(lam) + g)
    assert lhs == apply_cr(f).scaled(lam) + apply_cr(g)


@pytest.mark.parametrize("axis", [0, 4, 7])
def test_cr_commutes_with_shifts(axis):
    f = random_function(Region.cube(1), 9)
    sites = f.sites + np.asarray(unit(axis))
    moved = LatticeFunction(f.h, WHOLE, f.mode, sites, f.coeff_array, f.scale)
    out = apply_cr(f)
    out_moved = apply_cr(moved)
    back = LatticeFunction(f.h, WHOLE, f.mode, out_moved.sites - np.asarray(unit(axis)),
                           out_moved.coeff_array, out_moved.scale)
    assert back == out


@pytest.mark.parametrize("region", [UPPER, LOWER, Region.cube(2)])
def test_region_output_equals_restricted_whole(region):
    box = Region.cube(2) if region.kind == "box" else Region.cube(1)
    f = random_function(box, 2, region=region)
    on_region = apply_cr(f)
    whole = apply_cr(f.with_region(WHOLE)).restrict(region.interior).with_region(region)
    assert on_region == whole


def test_box_gather_and_scatter_agree():
    box = Region.cube(2)
    dense = random_function(box, 1, region=box)
    sparse = delta(ORIGIN, region=box) + delta((1,) * 8, region=box)
    for f in (dense, sparse):
        expected = apply_cr(f.with_region(WHOLE)).restrict(box.interior).with_region(box)
        assert apply_cr(f) == expected


@pytest.mark.parametrize("seed", range(3))
def test_factorization_exact(seed):
    f = random_function(Region.cube(1), seed, h=Fraction(1, 3))
    assert factorization_residual(f).is_zero()


def test_factorization_float():
    f = random_function(Region.cube(1), 0, mode=FLOAT)
    assert factorization_residual(f).max_abs() < 1e-12


def test_factorization_half_space_away_from_interface():
    # composed operators lose the m7 = 0 layer, so the identity holds from m7 = 2
    f = random_function(Region.cube(1), 7, region=UPPER)
    res = factorization_residual(f)
    assert not res.is_zero()
    assert (res.sites[:, 7] == 1).all()


def test_star_laplacian_on_delta():
    lap = star_laplacian(delta(ORIGIN, h=Fraction(1, 2)))
    assert lap.value(ORIGIN) == -64 * E[0]
    assert lap.value(unit(5, -1)) == 4 * E[0]


def test_zero_function_is_monogenic():
    assert is_monogenic(LatticeFunction.zero()).monogenic
    assert factorization_residual(LatticeFunction.zero()).is_zero()


def monogenic_pair(radius, h=1, multiplier=3):
    f = linear_combination([(1, E[0]), (2, -E[4])], Region.cube(radius), h)
    return f, f * E[multiplier]


@pytest.mark.parametrize("radius", [1, 2])
@pytest.mark.parametrize("h", [1, Fraction(1, 2)])
def test_monogenic_counterexample(radius, h):
    f, g = monogenic_pair(radius, h)
    assert is_monogenic(f).monogenic
    dg = apply_cr(g)
    interior = Region.cube(radius - 1)
    assert len(dg) == interior.size()
    assert all(value == 2 * E[5] for _, value in dg.items())
    check = is_monogenic(g)
    assert not check.monogenic and check.max_residual == 2 * E[5]


def test_right_multiplier_e0_stays_monogenic():
    f, g = monogenic_pair(1, multiplier=0)
    assert is_monogenic(g).monogenic


def test_left_and_right_operators_differ():
    f, _ = monogenic_pair(1)
    assert apply_cr(f, LEFT_BACKWARD) != apply_cr(f, RIGHT_BACKWARD)
    assert apply_cr(f, RIGHT_BACKWARD).value(ORIGIN) == 2 * E[1]


def test_tolerance_rules():
    f = random_function(Region.cube(1), 0)
    with pytest.raises(DomainError):
        is_monogenic(f, tol=1e-9)
    ff = random_function(Region.cube(1), 0, mode=FLOAT)
    with pytest.raises(DomainError):
        is_monogenic(ff)
    assert not is_monogenic(ff, tol=1e-9).monogenic


def test_float_monogenic_within_tolerance():
    f = linear_combination([(1, Octonion.basis(0, FLOAT)), (2, -Octonion.basis(4, FLOAT))],
                           Region.cube(1), 0.1)
    assert is_monogenic(f, tol=1e-12).monogenic


def test_bad_axis():
    with pytest.raises(DomainError):
        forward_diff(delta(), 8)
