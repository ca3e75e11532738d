"""Sorted site-array kernels shared by lattice functions and operators.

A sparse field is a pair ``(sites, coeffs)``: ``sites`` is an ``(N, 8)``
int64 array in strict lexicographic order, ``coeffs`` an ``(N, 8)`` array
of int64, Python-int objects, or float64.  Integer coefficients carry no
rounding; when a bound shows int64 could overflow they are promoted to the
object dtype before the operation.

Repeated sites are summed in their stable sorted order, so float results
do not depend on how duplicate contributions were interleaved.
"""
from __future__ import annotations

from math import gcd
from functools import reduce

import numpy as np

DIM = 8
INT_LIMIT = 2**62


def empty_sites() -> np.ndarray:
    return np.zeros((0, DIM), dtype=np.int64)


def is_int(coeffs: np.ndarray) -> bool:
    return coeffs.dtype != np.float64


def max_abs(coeffs: np.ndarray) -> int | float:
    if coeffs.size == 0:
        return 0
    if coeffs.dtype == object:
        return max(abs(int(x)) for x in coeffs.flat)
    return max(coeffs.max().item(), -coeffs.min().item())


def rows_all(mask: np.ndarray) -> np.ndarray:
    """``mask.all(axis=1)`` for an ``(N, 8)`` boolean array."""
    mask = np.ascontiguousarray(mask)
    return mask.view(np.uint64).reshape(-1) == 0x0101010101010101


def rows_any(mask: np.ndarray) -> np.ndarray:
    """``mask.any(axis=1)`` for an ``(N, 8)`` boolean array."""
    mask = np.ascontiguousarray(mask)
    return mask.view(np.uint64).reshape(-1) != 0


def nonzero_rows(coeffs: np.ndarray) -> np.ndarray:
    return rows_any(coeffs != 0)


def widen(coeffs: np.ndarray, bound) -> np.ndarray:
    """Promote int64 coefficients to Python ints when ``bound`` may overflow int64."""
    if coeffs.dtype == np.int64 and bound >= INT_LIMIT:
        return coeffs.astype(object)
    return coeffs


def narrow(coeffs: np.ndarray) -> np.ndarray:
    """Return int64 coefficients whenever the values fit."""
    if coeffs.dtype == object:
        if coeffs.size == 0 or max_abs(coeffs) < INT_LIMIT:
            return coeffs.astype(np.int64)
    return coeffs


def int_gcd(coeffs: np.ndarray) -> int:
    if coeffs.size == 0:
        return 0
    flat = coeffs.reshape(-1)
    g = 0
    # chunked so the common case (a unit coefficient early on) stops quickly
    for start in range(0, len(flat), 1 << 16):
        chunk = flat[start:start + (1 << 16)]
        if coeffs.dtype == np.int64:
            g = gcd(g, int(np.gcd.reduce(np.abs(chunk))))
        else:
            g = reduce(gcd, (int(x) for x in chunk), g)
        if g == 1:
            break
    return g


# --------------------------------------------------------------------------
# site keys


class KeyCodec:
    """Order-preserving packing of 8-D sites into int64 keys.

    The last axis varies fastest so integer order equals lexicographic
    site order.  Fails (``ok`` false) when the bounding box is too large.
    """

    def __init__(self, lo: np.ndarray, hi: np.ndarray):
        self.lo = np.asarray(lo, dtype=np.int64)
        span = np.asarray(hi, dtype=np.int64) - self.lo + 1
        strides = np.ones(DIM, dtype=np.int64)
        total = 1
        for ax in range(DIM - 1, -1, -1):
            strides[ax] = total
            total *= int(span[ax])
        self.ok = total < 2**62
        self.strides = strides

    @classmethod
    def covering(cls, *site_arrays: np.ndarray, pad: int = 0) -> KeyCodec:
        nonempty = [s for s in site_arrays if len(s)]
        if not nonempty:
            return cls(np.zeros(DIM), np.zeros(DIM))
        lo = np.min([s.min(axis=0) for s in nonempty], axis=0) - pad
        hi = np.max([s.max(axis=0) for s in nonempty], axis=0) + pad
        return cls(lo, hi)

    def encode(self, sites: np.ndarray) -> np.ndarray:
        return sites @ self.strides - int(self.lo @ self.strides)

    def shift(self, offset) -> int:
        """Key difference produced by moving a site by ``offset``."""
        return int(np.asarray(offset, dtype=np.int64) @ self.strides)


def lex_order(sites: np.ndarray) -> np.ndarray:
    """Stable permutation sorting ``sites`` lexicographically."""
    codec = KeyCodec.covering(sites)
    if codec.ok:
        return np.argsort(codec.encode(sites), kind="stable")
    return np.lexsort(sites.T[::-1])


def _group_starts(sorted_sites: np.ndarray) -> np.ndarray:
    if len(sorted_sites) == 0:
        return np.zeros(0, dtype=np.int64)
    new = np.ones(len(sorted_sites), dtype=bool)
    new[1:] = rows_any(sorted_sites[1:] != sorted_sites[:-1])
    return np.flatnonzero(new)


def _sum_runs(coeffs: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Add consecutive rows that share a group; groups begin at ``starts``.

    Rows are added in their sorted order, one duplicate layer at a time.
    """
    counts = np.diff(np.append(starts, len(coeffs)))
    out = coeffs[starts].copy()
    for r in range(1, int(counts.max())):
        sel = np.flatnonzero(counts > r)
        out[sel] += coeffs[starts[sel] + r]
    return out


def accumulate(sites: np.ndarray, coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sum coefficients of repeated sites; drop zero rows; sort lexicographically."""
    if len(sites) == 0:
        return empty_sites(), coeffs[:0]
    codec = KeyCodec.covering(sites)
    if codec.ok:
        keys = codec.encode(sites)
        if not np.all(keys[1:] > keys[:-1]):
            order = np.argsort(keys, kind="stable")
            keys, sites, coeffs = keys[order], sites[order], coeffs[order]
            new = np.ones(len(keys), dtype=bool)
            new[1:] = keys[1:] != keys[:-1]
            starts = np.flatnonzero(new)
            if len(starts) < len(sites):
                sites = sites[starts]
                coeffs = _sum_runs(coeffs, starts)
    else:
        order = np.lexsort(sites.T[::-1])
        sites, coeffs = sites[order], coeffs[order]
        starts = _group_starts(sites)
        if len(starts) < len(sites):
            sites = sites[starts]
            coeffs = _sum_runs(coeffs, starts)
    return drop_zero_rows(sites, coeffs)


def drop_zero_rows(sites: np.ndarray, coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    keep = nonzero_rows(coeffs)
    if not keep.all():
        sites, coeffs = np.compress(keep, sites, axis=0), np.compress(keep, coeffs, axis=0)
    return np.ascontiguousarray(sites), coeffs


def apply_matrix(coeffs: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """``coeffs @ mat`` for an integer ``8 x 8`` matrix, exact for integer input."""
    nz = mat != 0
    if nz.sum() <= 3:
        # a few column updates beat a dense product
        out = np.zeros(coeffs.shape, dtype=np.result_type(coeffs.dtype, mat.dtype))
        for r, c in zip(*np.nonzero(nz)):
            v = mat[r, c]
            if v == 1:
                out[:, c] += coeffs[:, r]
            elif v == -1:
                out[:, c] -= coeffs[:, r]
            else:
                out[:, c] += coeffs[:, r] * v
        return out
    if (nz.sum(axis=0) == 1).all() and (nz.sum(axis=1) == 1).all() and (np.abs(mat[nz]) == 1).all():
        # signed permutation: column c receives sign * column src[c]
        src = np.argmax(nz, axis=0)
        signs = mat[src, np.arange(DIM)]
        out = np.take(coeffs, src, axis=1)
        if (signs < 0).any():
            out *= signs.astype(out.dtype) if out.dtype != object else signs.astype(object)
        return out
    if coeffs.dtype == np.int64 and max_abs(coeffs) * int(np.abs(mat).sum(axis=0).max()) < 2**52:
        # float64 products and sums are exact below 2**53
        return (coeffs.astype(np.float64) @ mat.astype(np.float64)).astype(np.int64)
    if coeffs.dtype == np.float64:
        return coeffs @ mat.astype(np.float64)
    return coeffs @ mat.astype(coeffs.dtype)


def find_duplicate(sites: np.ndarray) -> np.ndarray | None:
    """Return one site that occurs more than once, or ``None``."""
    if len(sites) < 2:
        return None
    s = sites[lex_order(sites)]
    dup = np.flatnonzero(rows_all(s[1:] == s[:-1]))
    return s[dup[0]] if len(dup) else None


def match(a_sites: np.ndarray, b_sites: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row indices ``(ia, ib)`` of sites common to two sorted site arrays."""
    if len(a_sites) == 0 or len(b_sites) == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z
    codec = KeyCodec.covering(a_sites, b_sites)
    if codec.ok:
        ka, kb = codec.encode(a_sites), codec.encode(b_sites)
        pos = np.searchsorted(kb, ka)
        pos_c = np.minimum(pos, len(kb) - 1)
        hit = kb[pos_c] == ka
        return np.flatnonzero(hit), pos_c[hit]
    index = {tuple(row): n for n, row in enumerate(b_sites.tolist())}
    pairs = [(n, index[tuple(row)]) for n, row in enumerate(a_sites.tolist()) if tuple(row) in index]
    if not pairs:
        z = np.zeros(0, dtype=np.int64)
        return z, z
    ia, ib = zip(*pairs)
    return np.asarray(ia, dtype=np.int64), np.asarray(ib, dtype=np.int64)


def lookup(sites: np.ndarray, site) -> int | None:
    """Row of ``site`` in a sorted site array, or ``None``."""
    if len(sites) == 0:
        return None
    target = np.asarray(site, dtype=np.int64).reshape(1, DIM)
    ia, ib = match(target, sites)
    return int(ib[0]) if len(ib) else None


# --------------------------------------------------------------------------
# reductions


def gram(a: np.ndarray, b: np.ndarray, block: int = 4096) -> np.ndarray:
    """``G[i, k] = sum_m a[m, i] * b[m, k]`` over aligned rows.

    Integer input is summed exactly.  Float input is summed per fixed block
    of rows and the block results are added in row order.
    """
    if is_int(a) and is_int(b):
        bound = max_abs(a) * max_abs(b) * max(len(a), 1)
        if bound >= INT_LIMIT:
            a, b = a.astype(object), b.astype(object)
        return a.T @ b
    a = a.astype(np.float64)
    b = b.astype(np.float64)
    out = np.zeros((DIM, DIM))
    for start in range(0, len(a), block):
        aa = a[start:start + block]
        bb = b[start:start + block]
        out += np.einsum("mi,mk->ik", aa, bb)
    return out
