"""Brute-force evaluation of the Stokes pairing.

This module deliberately shares no code with :mod:`octolattice.stokes` or
:mod:`octolattice.operators`.  It reads the functions only through
``items()``, lays them out on a dense box (the joint bounding box padded by
one site), takes differences by array slicing, and expands every product
into basis components with :func:`~octolattice.algebra.basis_mul`.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import lcm

import numpy as np

from .algebra import EXACT, Octonion, basis_mul
from .errors import DomainError

MAX_SITES = 10**7


def _dense(items, lo, shape, mode, den):
    arr = np.zeros(tuple(shape) + (8,), dtype=object if mode == EXACT else np.float64)
    for site, value in items:
        idx = tuple(s - l for s, l in zip(site, lo))
        for c in range(8):
            if mode == EXACT:
                arr[idx + (c,)] = int(value[c] * den)
            else:
                arr[idx + (c,)] = value[c]
    return arr


def _fwd(a, axis):
    out = np.zeros_like(a)
    n = a.shape[axis]
    hi = [slice(None)] * a.ndim
    lo = [slice(None)] * a.ndim
    hi[axis] = slice(1, n)
    lo[axis] = slice(0, n - 1)
    out[tuple(lo)] = a[tuple(hi)] - a[tuple(lo)]
    last = [slice(None)] * a.ndim
    last[axis] = n - 1
    out[tuple(last)] = -a[tuple(last)]
    return out


def _bwd(a, axis):
    out = np.zeros_like(a)
    n = a.shape[axis]
    hi = [slice(None)] * a.ndim
    lo = [slice(None)] * a.ndim
    hi[axis] = slice(1, n)
    lo[axis] = slice(0, n - 1)
    out[tuple(hi)] = a[tuple(hi)] - a[tuple(lo)]
    first = [slice(None)] * a.ndim
    first[axis] = 0
    out[tuple(first)] = a[tuple(first)]
    return out


def brute_force_oracle(g, f, sign: int, region=None, max_sites: int = MAX_SITES) -> Octonion:
    """Pairing ``sum {[(g D+) f] + sign g [D- f]} h^8`` by full component expansion.

    ``region`` defaults to the functions' region and selects the summation
    sites: all of them, ``m[7] >= 1`` (upper) or ``m[7] <= -1`` (lower).
    """
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    if g.mode != f.mode or g.h != f.h:
        raise DomainError("g and f must share mode and lattice constant")
    region = region if region is not None else g.region
    kind = region.kind
    if kind not in ("whole", "upper", "lower"):
        raise DomainError(f"oracle sums over whole, upper or lower regions, got {region}")
    mode, h = g.mode, g.h
    g_items, f_items = list(g.items()), list(f.items())
    sites = [s for s, _ in g_items] + [s for s, _ in f_items]
    if not sites:
        return Octonion.zero(mode)
    lo = [min(s[a] for s in sites) - 1 for a in range(8)]
    hi = [max(s[a] for s in sites) + 1 for a in range(8)]
    shape = [b - a + 1 for a, b in zip(lo, hi)]
    n_sites = int(np.prod(shape))
    if n_sites > max_sites:
        raise DomainError(f"padded box holds {n_sites} sites, above the oracle limit {max_sites}")

    den = 1
    if mode == EXACT:
        den = lcm(1, *(c.denominator for _, v in g_items + f_items for c in v))
    G = _dense(g_items, lo, shape, mode, den)
    F = _dense(f_items, lo, shape, mode, den)
    if mode == EXACT:
        peak = max(int(np.abs(G).max()), int(np.abs(F).max()), 1)
        if (2 * peak) * peak * n_sites < 2**62:
            G, F = G.astype(np.int64), F.astype(np.int64)

    m7 = np.arange(lo[7], hi[7] + 1).reshape((1,) * 7 + (-1,))
    if kind == "upper":
        keep = np.broadcast_to(m7 >= 1, shape)
    elif kind == "lower":
        keep = np.broadcast_to(m7 <= -1, shape)
    else:
        keep = np.ones(shape, dtype=bool)
    Gk, Fk = G[keep], F[keep]

    acc = [0] * 8
    for j in range(8):
        dG = _fwd(G, j)[keep]
        dF = _bwd(F, j)[keep]
        for i, k in itertools.product(range(8), repeat=2):
            first = dG[:, i].dot(Fk[:, k])
            second = Gk[:, i].dot(dF[:, k])
            # [(dg_i e_i) e_j] (f_k e_k)
            s1, ij = basis_mul(i, j)
            s2, idx1 = basis_mul(ij, k)
            acc[idx1] += s1 * s2 * first
            # (g_i e_i) [e_j (df_k e_k)]
            s3, jk = basis_mul(j, k)
            s4, idx2 = basis_mul(i, jk)
            acc[idx2] += sign * s3 * s4 * second
    if mode == EXACT:
        factor = Fraction(h) ** 7 / (den * den)
        return Octonion([Fraction(int(a)) * factor for a in acc], EXACT)
    factor = float(h) ** 7
    return Octonion([float(a) * factor for a in acc], mode)
