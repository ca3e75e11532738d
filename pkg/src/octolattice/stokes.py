"""Discrete Stokes pairings, their summation-by-parts decomposition, and reports.

The pairing of ``g`` and ``f`` with sign ``s`` is

    P_s(g, f) = sum_m { [(g D+)(m)] f(m) + s g(m) [(D- f)(m)] } h^8

summed over the operator interior of the region.  Summation by parts moves
the forward difference off ``g`` and yields, exactly,

    P_s = C_s + B,

    C_s = sum_m sum_{ijk} g_i (d-_j f_k) [s e_i(e_j e_k) - (e_i e_j) e_k] h^8,

where ``B`` is zero on the whole lattice and an interface sum over the
layers next to ``m[7] = 0`` on a half lattice.  ``C_s`` keeps only the
component triples on which ``(e_i e_j) e_k`` and ``s e_i (e_j e_k)``
disagree, so ``C_{-1}`` is supported on associating triples and ``C_{+1}``
equals minus the associator sum.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import _sparse as sp
from .algebra import (
    EXACT,
    MUL_INDEX,
    MUL_SIGN,
    TRIPLE_INDEX,
    TRIPLE_LEFT,
    TRIPLE_RIGHT,
    Octonion,
    format_scalar,
    mul,
)
from .errors import DomainError
from .lattice import DIM, LOWER, TIME_AXIS, UPPER, WHOLE, LatticeFunction, Region
from .operators import LEFT_BACKWARD, RIGHT_FORWARD, apply_cr, backward_diff

PLUS, MINUS = 1, -1
THEOREM_REGIONS = {"T1": WHOLE, "T2": UPPER, "T3": LOWER}


def _check_pair(g: LatticeFunction, f: LatticeFunction) -> None:
    if g.mode != f.mode:
        raise DomainError(f"mode mismatch: {g.mode} vs {f.mode}")
    if g.h != f.h:
        raise DomainError(f"lattice constant mismatch: {g.h} vs {f.h}")
    if g.region != f.region:
        raise DomainError(f"region mismatch: {g.region} vs {f.region}")


def _check_sign(sign: int) -> int:
    if sign not in (PLUS, MINUS):
        raise DomainError(f"pairing sign must be +1 or -1, got {sign}")
    return sign


def _to_octonion(vec, scale, mode: str) -> Octonion:
    if mode == EXACT:
        return Octonion([int(v) * scale for v in vec], EXACT)
    return Octonion([float(v) * scale for v in vec], mode)


def _weighted(gram: np.ndarray, sign: np.ndarray, index: np.ndarray) -> list:
    """Collapse ``sum_{ik} gram[i,k] sign[i,k] e_{index[i,k]}`` into 8 coefficients."""
    out = [0] * DIM
    for i in range(DIM):
        for k in range(DIM):
            c = gram[i, k]
            if c:
                out[index[i, k]] += sign[i, k] * c
    return out


def _layer_gram(a: LatticeFunction, b: LatticeFunction, a_row: int, b_row: int):
    """Gram matrix of ``a`` on layer ``m[7] = a_row`` against ``b`` on layer ``b_row``,
    matched by the first seven coordinates."""
    sa = a.sites[:, TIME_AXIS] == a_row
    sb = b.sites[:, TIME_AXIS] == b_row
    a_sites = a.sites[sa].copy()
    a_sites[:, TIME_AXIS] = 0
    b_sites = b.sites[sb].copy()
    b_sites[:, TIME_AXIS] = 0
    ia, ib = sp.match(a_sites, b_sites)
    return sp.gram(a.coeff_array[sa][ia], b.coeff_array[sb][ib])


def product_sum(a: LatticeFunction, b: LatticeFunction) -> Octonion:
    """``sum_m a(m) b(m)`` over the sites both functions store."""
    ia, ib = sp.match(a.sites, b.sites)
    gram = sp.gram(a.coeff_array[ia], b.coeff_array[ib])
    return _to_octonion(_weighted(gram, MUL_SIGN, MUL_INDEX), a.scale * b.scale, a.mode)


def _h_power(h, p: int):
    return h ** p


def pairing(g: LatticeFunction, f: LatticeFunction, sign: int = MINUS) -> Octonion:
    """``sum_m {[(g D+)(m)] f(m) + sign * g(m) [(D- f)(m)]} h^8`` over the operator interior."""
    _check_pair(g, f)
    _check_sign(sign)
    gd = apply_cr(g, RIGHT_FORWARD)
    df = apply_cr(f, LEFT_BACKWARD)
    first = product_sum(gd, f)
    second = product_sum(g, df)
    total = first + second if sign == PLUS else first - second
    return total * _h_power(g.h, 8)


def correction_tensor(sign: int) -> np.ndarray:
    """``T[i, j, k]`` coefficient of ``e_{TRIPLE_INDEX[i,j,k]}`` in ``sign e_i(e_j e_k) - (e_i e_j) e_k``."""
    return sign * TRIPLE_RIGHT - TRIPLE_LEFT


def correction_term(g: LatticeFunction, f: LatticeFunction, sign: int = MINUS) -> Octonion:
    """``sum_m sum_{ijk} g_i (d-_j f_k) T_sign(i,j,k) h^8`` over the operator interior."""
    _check_pair(g, f)
    tensor = correction_tensor(_check_sign(sign))
    total = Octonion.zero(g.mode)
    for j in range(DIM):
        dj = backward_diff(f, j)
        ia, ib = sp.match(g.sites, dj.sites)
        gram = sp.gram(g.coeff_array[ia], dj.coeff_array[ib])
        vec = _weighted(gram, tensor[:, j, :], TRIPLE_INDEX[:, j, :])
        total = total + _to_octonion(vec, g.scale * dj.scale, g.mode)
    return total * _h_power(g.h, 8)


def _half_space(g: LatticeFunction, f: LatticeFunction) -> str:
    _check_pair(g, f)
    if g.region == UPPER:
        return "upper"
    if g.region == LOWER:
        return "lower"
    raise DomainError(f"boundary terms need a half-lattice region, got {g.region}")


def boundary_term_claim(g: LatticeFunction, f: LatticeFunction, h_power: int = 8) -> Octonion:
    """Interface expression ``+-sum e7 (g(m, a) f(m, b)) h^p`` as printed.

    Upper half: ``+ e7 (g(.,1) f(.,0))``; lower half: ``- e7 (g(.,0) f(.,-1))``.
    The whole octonion ``f`` is used for the unbound component index.
    """
    if h_power not in (7, 8):
        raise DomainError(f"h_power must be 7 or 8, got {h_power}")
    side = _half_space(g, f)
    rows = (1, 0) if side == "upper" else (0, -1)
    gram = _layer_gram(g, f, *rows)
    inner = _to_octonion(_weighted(gram, MUL_SIGN, MUL_INDEX), g.scale * f.scale, g.mode)
    value = mul(Octonion.basis(7, g.mode), inner) * _h_power(g.h, h_power)
    return value if side == "upper" else -value


def boundary_term_derived(g: LatticeFunction, f: LatticeFunction) -> Octonion:
    """Interface term left over by summation by parts along axis 7.

    Upper half: ``- sum g_i(.,1) f_k(.,0) (e_i e7) e_k h^7``;
    lower half: ``+ sum g_i(.,0) f_k(.,-1) (e_i e7) e_k h^7``.
    """
    side = _half_space(g, f)
    rows = (1, 0) if side == "upper" else (0, -1)
    gram = _layer_gram(g, f, *rows)
    vec = _weighted(gram, TRIPLE_LEFT[:, TIME_AXIS, :], TRIPLE_INDEX[:, TIME_AXIS, :])
    value = _to_octonion(vec, g.scale * f.scale, g.mode) * _h_power(g.h, 7)
    return -value if side == "upper" else value


# --------------------------------------------------------------------------
# reports


def _oct_json(x: Octonion) -> list[str]:
    return x.to_strings()


@dataclass
class IdentityReport:
    theorem: str
    region: Region
    sign: int
    h: Any
    h_power: int
    mode: str
    claim_lhs: Octonion
    claim_rhs: Octonion
    claim_residual: Octonion
    correction: Octonion
    boundary_derived: Octonion
    derived_value: Octonion
    derived_residual: Octonion
    claim_rhs_by_h_power: dict[int, Octonion] = field(default_factory=dict)
    seed: int | None = None
    box: Region | None = None
    site_count: int = 0
    elapsed_ms: float = 0.0

    def derived_ok(self, tol: float | None = None) -> bool:
        """Exact zero in exact mode; within ``tol`` in float mode."""
        if self.mode == EXACT:
            return self.derived_residual.is_zero()
        if tol is None:
            raise DomainError("float mode needs an explicit tolerance")
        return max(abs(c) for c in self.derived_residual) <= tol

    def to_dict(self) -> dict:
        box = None
        if self.box is not None:
            box = {"lo": list(self.box.lo), "hi": list(self.box.hi)}
        return {
            "theorem": self.theorem,
            "region": str(self.region),
            "sign": "plus" if self.sign == PLUS else "minus",
            "h": format_scalar(self.h),
            "h_power": self.h_power,
            "mode": self.mode,
            "seed": self.seed,
            "box": box,
            "claim_lhs": _oct_json(self.claim_lhs),
            "claim_rhs": _oct_json(self.claim_rhs),
            "claim_residual": _oct_json(self.claim_residual),
            "claim_residual_by_h_power": {
                str(p): _oct_json(self.claim_lhs - rhs) for p, rhs in sorted(self.claim_rhs_by_h_power.items())
            },
            "correction": _oct_json(self.correction),
            "boundary_derived": _oct_json(self.boundary_derived),
            "derived_value": _oct_json(self.derived_value),
            "derived_residual": _oct_json(self.derived_residual),
            "site_count": self.site_count,
            "elapsed_ms": self.elapsed_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def theorem_report(g: LatticeFunction, f: LatticeFunction, theorem: str, *,
                   sign: int = MINUS, h_power: int = 8, seed: int | None = None,
                   box: Region | None = None) -> IdentityReport:
    """Evaluate one Stokes statement on ``g``, ``f`` and check the derived identity.

    ``claim_rhs`` is zero for T1 and the printed interface expression for T2
    and T3 (evaluated with ``h_power``; both powers are recorded).  The derived
    residual ``pairing - correction - boundary_derived`` must vanish.
    """
    if theorem not in THEOREM_REGIONS:
        raise DomainError(f"unknown theorem {theorem!r}; expected T1, T2 or T3")
    _check_pair(g, f)
    if g.region != THEOREM_REGIONS[theorem]:
        raise DomainError(f"{theorem} needs region {THEOREM_REGIONS[theorem]}, got {g.region}")
    if h_power not in (7, 8):
        raise DomainError(f"h_power must be 7 or 8, got {h_power}")
    start = time.perf_counter()
    lhs = pairing(g, f, sign)
    corr = correction_term(g, f, sign)
    zero = Octonion.zero(g.mode)
    if theorem == "T1":
        bnd = zero
        rhs_by_power = {7: zero, 8: zero}
    else:
        bnd = boundary_term_derived(g, f)
        rhs_by_power = {p: boundary_term_claim(g, f, p) for p in (7, 8)}
    rhs = rhs_by_power[h_power]
    derived = corr + bnd
    union = sp.accumulate(np.concatenate([g.sites, f.sites]),
                          np.ones((len(g) + len(f), DIM), dtype=np.int64))[0]
    elapsed = (time.perf_counter() - start) * 1000.0
    return IdentityReport(
        theorem=theorem,
        region=g.region,
        sign=sign,
        h=g.h,
        h_power=h_power,
        mode=g.mode,
        claim_lhs=lhs,
        claim_rhs=rhs,
        claim_residual=lhs - rhs,
        correction=corr,
        boundary_derived=bnd,
        derived_value=derived,
        derived_residual=lhs - derived,
        claim_rhs_by_h_power=rhs_by_power,
        seed=seed,
        box=box,
        site_count=len(union),
        elapsed_ms=round(elapsed, 3),
    )
