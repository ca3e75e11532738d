"""Finite differences and discrete Cauchy-Riemann operators on lattice functions.

Every operator here is a stencil: a sum over a few site offsets of a fixed
real-linear map applied to the shifted octonion value, divided by a power
of h.  Multiplication by a basis unit is one such map (a signed
permutation of components), so ``e_j (df)`` is computed exactly as
written, without reassociating anything.

On half-space and box regions the output is kept only on the operator
interior of the region: ``m[7] >= 1`` (upper), ``m[7] <= -1`` (lower),
or the strict interior of the box.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _sparse as sp
from .algebra import EXACT, MUL_INDEX, MUL_SIGN, Octonion, to_scalar
from .errors import DomainError
from .lattice import DIM, LatticeFunction, unit

FORWARD, BACKWARD = "forward", "backward"
LEFT, RIGHT = "left", "right"

_IDENTITY = np.eye(DIM, dtype=np.int64)


def basis_matrix(b: int, side: str) -> np.ndarray:
    """Matrix ``M`` with ``row @ M`` equal to ``e_b * x`` (left) or ``x * e_b`` (right)."""
    m = np.zeros((DIM, DIM), dtype=np.int64)
    for k in range(DIM):
        if side == LEFT:
            m[k, MUL_INDEX[b, k]] = MUL_SIGN[b, k]
        else:
            m[k, MUL_INDEX[k, b]] = MUL_SIGN[k, b]
    return m


def apply_stencil(f: LatticeFunction, stencil: dict, h_power: int) -> LatticeFunction:
    """``out(m) = h^-h_power * sum_off f(m + off) @ stencil[off]`` on the operator interior.

    ``stencil`` maps integer offset tuples to integer ``8 x 8`` matrices.
    """
    region = f.region
    sites, coeffs = f.sites, f.coeff_array
    exact = f.mode == EXACT
    if exact:
        bound = sp.max_abs(coeffs) * sum(int(np.abs(mat).sum(axis=0).max()) for mat in stencil.values())
        coeffs = sp.widen(coeffs, bound)

    if region.kind == "box" and len(sites):
        inner = region.interior_box()
        if inner is None:
            return LatticeFunction.zero(f.h, region, f.mode)
        if inner.size() <= 2 * len(sites):
            return _gather(f, coeffs, inner, stencil, h_power)

    bad_count = None
    if region.kind != "whole" and len(sites):
        per_axis = np.ones(sites.shape, dtype=bool)
        for ax in range(DIM):
            per_axis[:, ax] = region.axis_interior(sites[:, ax], ax)
        bad = ~per_axis
        bad_count = bad.sum(axis=1)

    out_sites, out_coeffs = [], []
    for off, mat in stencil.items():
        off = np.asarray(off, dtype=np.int64)
        moved = np.flatnonzero(off)
        if bad_count is None:
            keep = slice(None)
        else:
            # interior test of m = site - off, reusing the per-axis results
            n_bad = bad_count.copy()
            ok = np.ones(len(sites), dtype=bool)
            for ax in moved:
                n_bad -= bad[:, ax]
                ok &= region.axis_interior(sites[:, ax] - off[ax], ax)
            keep = np.flatnonzero(ok & (n_bad == 0))
        s = sites[keep]
        if moved.size:
            s = s - off
        out_sites.append(s)
        out_coeffs.append(sp.apply_matrix(coeffs[keep], _typed(mat, coeffs)))
    if not out_sites:
        return LatticeFunction.zero(f.h, region, f.mode)
    return _finish(f, np.concatenate(out_sites), np.concatenate(out_coeffs), h_power)


def _typed(mat: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    return mat.astype(np.float64 if coeffs.dtype == np.float64 else coeffs.dtype)


def _gather(f: LatticeFunction, coeffs: np.ndarray, inner, stencil: dict,
            h_power: int) -> LatticeFunction:
    """Stencil evaluated by looking up every interior site of a box region.

    Contributions are added in stencil order, as in the scatter path.
    """
    region = f.region
    out_sites = inner.sites()
    codec = sp.KeyCodec(np.asarray(region.lo), np.asarray(region.hi))
    keys = codec.encode(f.sites)
    dense = len(keys) == region.size()
    base = codec.encode(out_sites)
    acc = np.zeros((len(out_sites), DIM), dtype=coeffs.dtype)
    for off, mat in stencil.items():
        target = base + codec.shift(off)
        if dense:
            acc += sp.apply_matrix(coeffs[target], _typed(mat, coeffs))
            continue
        pos = np.minimum(np.searchsorted(keys, target), len(keys) - 1)
        found = keys[pos] == target
        if found.all():
            acc += sp.apply_matrix(coeffs[pos], _typed(mat, coeffs))
            continue
        hit = np.flatnonzero(found)
        acc[hit] += sp.apply_matrix(coeffs[pos[hit]], _typed(mat, coeffs))
    return _finish(f, out_sites, acc, h_power, _sorted=True)


def _finish(f, sites, coeffs, h_power, _sorted=False) -> LatticeFunction:
    if f.mode == EXACT:
        scale = f.scale / f.h ** h_power
    else:
        coeffs = coeffs / f.h ** h_power
        scale = 1.0
    return LatticeFunction(f.h, f.region, f.mode, sites, coeffs, scale, _sorted=_sorted)


def _add_term(stencil: dict, off, mat) -> None:
    off = tuple(int(x) for x in off)
    if off in stencil:
        stencil[off] = stencil[off] + mat
    else:
        stencil[off] = mat.copy()


def _diff_stencil(j: int, direction: str, mat: np.ndarray, stencil: dict) -> None:
    zero = (0,) * DIM
    if direction == FORWARD:
        _add_term(stencil, unit(j, 1), mat)
        _add_term(stencil, zero, -mat)
    elif direction == BACKWARD:
        _add_term(stencil, zero, mat)
        _add_term(stencil, unit(j, -1), -mat)
    else:
        raise DomainError(f"unknown direction {direction!r}")


def _check_axis(j: int) -> None:
    if not 0 <= j < DIM:
        raise DomainError(f"axis must lie in 0..7, got {j}")


def forward_diff(f: LatticeFunction, j: int) -> LatticeFunction:
    """``(f(m + e_j) - f(m)) / h``."""
    _check_axis(j)
    st: dict = {}
    _diff_stencil(j, FORWARD, _IDENTITY, st)
    return apply_stencil(f, st, 1)


def backward_diff(f: LatticeFunction, j: int) -> LatticeFunction:
    """``(f(m) - f(m - e_j)) / h``."""
    _check_axis(j)
    st: dict = {}
    _diff_stencil(j, BACKWARD, _IDENTITY, st)
    return apply_stencil(f, st, 1)


@dataclass(frozen=True)
class OperatorVariant:
    """Which discrete Cauchy-Riemann operator to apply.

    ``side="left"`` computes ``sum_j e_j (d_j f)``; ``side="right"`` computes
    ``sum_j (d_j f) e_j``.  The conjugated operator flips the sign of the
    imaginary units ``j >= 1``.
    """

    direction: str = BACKWARD
    side: str = LEFT
    conjugated: bool = False

    def __post_init__(self):
        if self.direction not in (FORWARD, BACKWARD):
            raise DomainError(f"unknown direction {self.direction!r}")
        if self.side not in (LEFT, RIGHT):
            raise DomainError(f"unknown side {self.side!r}")

    def __str__(self) -> str:
        bar = "conj-" if self.conjugated else ""
        return f"{self.side}-{bar}{self.direction}"


LEFT_FORWARD = OperatorVariant(FORWARD, LEFT)
LEFT_BACKWARD = OperatorVariant(BACKWARD, LEFT)
RIGHT_FORWARD = OperatorVariant(FORWARD, RIGHT)
RIGHT_BACKWARD = OperatorVariant(BACKWARD, RIGHT)


def cr_stencil(v: OperatorVariant) -> dict:
    st: dict = {}
    for j in range(DIM):
        mat = basis_matrix(j, v.side)
        if v.conjugated and j >= 1:
            mat = -mat
        _diff_stencil(j, v.direction, mat, st)
    return st


def apply_cr(f: LatticeFunction, v: OperatorVariant = LEFT_BACKWARD) -> LatticeFunction:
    """Apply the discrete Cauchy-Riemann operator selected by ``v``."""
    return apply_stencil(f, cr_stencil(v), 1)


@dataclass(frozen=True)
class MonogenicCheck:
    monogenic: bool
    max_residual: Octonion
    site: tuple[int, ...] | None
    checked_sites: int

    def __bool__(self) -> bool:
        return self.monogenic


def is_monogenic(f: LatticeFunction, v: OperatorVariant = LEFT_BACKWARD,
                 tol: float | None = None) -> MonogenicCheck:
    """Whether ``apply_cr(f, v)`` vanishes on the operator interior.

    Exact mode compares with zero and refuses a nonzero ``tol``; float mode
    requires ``tol``.  The residual reported is the value at the site with
    the largest absolute component (first such site in lexicographic order).
    """
    if f.mode == EXACT:
        if tol not in (None, 0):
            raise DomainError("exact mode checks against zero; no tolerance allowed")
    elif tol is None:
        raise DomainError("float mode needs an explicit tolerance")
    return residual_check(apply_cr(f, v), tol)


def residual_check(out: LatticeFunction, tol: float | None = None) -> MonogenicCheck:
    """Summarize an operator output that should vanish (``tol`` ignored in exact mode)."""
    f = out
    if out.is_zero():
        return MonogenicCheck(True, Octonion.zero(f.mode), None, len(out))
    per_site = np.abs(out.coeff_array).max(axis=1)
    row = int(np.argmax(per_site))
    site = tuple(out.sites[row].tolist())
    worst = out.value(site)
    size = out.max_abs()
    ok = size == 0 if f.mode == EXACT else tol is not None and size <= tol
    return MonogenicCheck(bool(ok), worst, site, len(out))


def star_laplacian(f: LatticeFunction) -> LatticeFunction:
    """``h^-2 sum_{j=0..7} (f(m+e_j) - 2 f(m) + f(m-e_j))`` over all eight axes."""
    st: dict = {(0,) * DIM: -2 * DIM * _IDENTITY}
    for j in range(DIM):
        _add_term(st, unit(j, 1), _IDENTITY)
        _add_term(st, unit(j, -1), _IDENTITY)
    return apply_stencil(f, st, 2)


def factorization_residual(f: LatticeFunction) -> LatticeFunction:
    """``Lap f - (D+ (conj D-) f + D- (conj D+) f) / 2`` with left-sided operators."""
    conj_back = OperatorVariant(BACKWARD, LEFT, conjugated=True)
    conj_fwd = OperatorVariant(FORWARD, LEFT, conjugated=True)
    a = apply_cr(apply_cr(f, conj_back), LEFT_FORWARD)
    b = apply_cr(apply_cr(f, conj_fwd), LEFT_BACKWARD)
    return star_laplacian(f) - (a + b).scaled(to_scalar(Fraction(1, 2), f.mode))
