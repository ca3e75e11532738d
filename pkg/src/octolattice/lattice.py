"""Finitely supported octonion-valued functions on the lattice h Z^8.

Axes are numbered 0..7 and axis ``j`` pairs with the basis unit ``e_j``.
A :class:`LatticeFunction` stores its support as a lexicographically sorted
``(N, 8)`` site array.  In exact mode the values are integer numerators
sharing one rational ``scale`` (value = numerator * scale), reduced so that
the numerators have gcd 1 and ``scale > 0``; equal functions therefore have
identical storage.  Zero values are never stored.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from pathlib import Path
from typing import Iterator, Sequence, Union

import numpy as np

from . import _sparse as sp
from .algebra import (
    EXACT,
    FLOAT,
    MODES,
    MUL_INDEX,
    MUL_SIGN,
    Octonion,
    Scalar,
    format_scalar,
    parse_scalar,
    to_scalar,
)
from .errors import DomainError, ParseError

DIM = 8
TIME_AXIS = 7

MultiIndex = tuple[int, ...]


def as_index(m: Sequence[int]) -> MultiIndex:
    m = tuple(int(x) for x in m)
    if len(m) != DIM:
        raise DomainError(f"a lattice site has 8 coordinates, got {len(m)}")
    return m


def unit(axis: int, step: int = 1) -> MultiIndex:
    m = [0] * DIM
    m[axis] = step
    return tuple(m)


# --------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class Region:
    """Where a function may hold data, and where operators act.

    ``upper`` holds data for ``m[7] >= 0`` and its operator interior is
    ``m[7] >= 1``; ``lower`` mirrors this.  A box holds ``lo <= m <= hi``
    with interior ``lo < m < hi``.
    """

    kind: str
    lo: MultiIndex | None = None
    hi: MultiIndex | None = None

    def __post_init__(self):
        if self.kind not in ("whole", "upper", "lower", "box"):
            raise DomainError(f"unknown region kind {self.kind!r}")
        if self.kind == "box":
            if self.lo is None or self.hi is None:
                raise DomainError("box region needs lo and hi")
            object.__setattr__(self, "lo", as_index(self.lo))
            object.__setattr__(self, "hi", as_index(self.hi))
            if any(a > b for a, b in zip(self.lo, self.hi)):
                raise DomainError(f"empty box {self.lo}..{self.hi}")

    @classmethod
    def box(cls, lo: Sequence[int], hi: Sequence[int]) -> Region:
        return cls("box", as_index(lo), as_index(hi))

    @classmethod
    def cube(cls, radius: int, center: Sequence[int] = (0,) * DIM) -> Region:
        c = as_index(center)
        return cls.box([x - radius for x in c], [x + radius for x in c])

    def admits(self, sites: np.ndarray) -> np.ndarray:
        if self.kind == "whole":
            return np.ones(len(sites), dtype=bool)
        if self.kind == "upper":
            return sites[:, TIME_AXIS] >= 0
        if self.kind == "lower":
            return sites[:, TIME_AXIS] <= 0
        return _in_box(sites, self.lo, self.hi)

    def interior(self, sites: np.ndarray) -> np.ndarray:
        """Mask of sites where every first-order stencil stays inside the region."""
        if self.kind == "whole":
            return np.ones(len(sites), dtype=bool)
        if self.kind == "upper":
            return sites[:, TIME_AXIS] >= 1
        if self.kind == "lower":
            return sites[:, TIME_AXIS] <= -1
        return _in_box(sites, [a + 1 for a in self.lo], [b - 1 for b in self.hi])

    def axis_interior(self, coords: np.ndarray, axis: int) -> np.ndarray | bool:
        """Interior condition on a single coordinate column."""
        if self.kind == "box":
            return (coords >= self.lo[axis] + 1) & (coords <= self.hi[axis] - 1)
        if axis == TIME_AXIS and self.kind == "upper":
            return coords >= 1
        if axis == TIME_AXIS and self.kind == "lower":
            return coords <= -1
        return True

    def sites(self) -> np.ndarray:
        """All sites of a box region in lexicographic order."""
        if self.kind != "box":
            raise DomainError(f"region {self} is not finite")
        shape = [b - a + 1 for a, b in zip(self.lo, self.hi)]
        grid = np.ascontiguousarray(np.indices(shape, dtype=np.int64).reshape(DIM, -1).T)
        grid += np.asarray(self.lo, dtype=np.int64)
        return grid

    def interior_box(self) -> Region | None:
        """The operator interior of a box as a box, or ``None`` when empty."""
        if self.kind != "box":
            raise DomainError(f"region {self} is not a box")
        lo = [a + 1 for a in self.lo]
        hi = [b - 1 for b in self.hi]
        if any(a > b for a, b in zip(lo, hi)):
            return None
        return Region.box(lo, hi)

    def size(self) -> int:
        if self.kind != "box":
            raise DomainError(f"region {self} is not finite")
        n = 1
        for a, b in zip(self.lo, self.hi):
            n *= b - a + 1
        return n

    def __str__(self) -> str:
        if self.kind == "box":
            return f"box {','.join(map(str, self.lo))}..{','.join(map(str, self.hi))}"
        return self.kind

    @classmethod
    def parse(cls, text: str) -> Region:
        text = text.strip()
        if text in ("whole", "upper", "lower"):
            return cls(text)
        m = re.fullmatch(r"box\s+(\S+)\.\.(\S+)", text)
        if not m:
            raise ParseError(f"bad region {text!r}")
        try:
            lo = [int(x) for x in m.group(1).split(",")]
            hi = [int(x) for x in m.group(2).split(",")]
            return cls.box(lo, hi)
        except (ValueError, DomainError) as exc:
            raise ParseError(f"bad box region {text!r}: {exc}") from exc


def _in_box(sites: np.ndarray, lo, hi) -> np.ndarray:
    lo = np.asarray(lo, dtype=np.int64)
    span = np.asarray(hi, dtype=np.int64) - lo
    if (span < 0).any():
        return np.zeros(len(sites), dtype=bool)
    # negative offsets wrap to huge unsigned values
    return sp.rows_all((sites - lo).view(np.uint64) <= span.astype(np.uint64))


WHOLE = Region("whole")
UPPER = Region("upper")
LOWER = Region("lower")


# --------------------------------------------------------------------------
# functions


def _fraction_scale(values: Sequence[Fraction]) -> int:
    return lcm(1, *(v.denominator for v in values))


class LatticeFunction:
    """Immutable finitely supported map from lattice sites to octonions."""

    __slots__ = ("h", "region", "mode", "_sites", "_coeffs", "_scale")

    def __init__(self, h, region: Region, mode: str, sites: np.ndarray,
                 coeffs: np.ndarray, scale: Scalar = 1, *, _sorted: bool = False):
        if mode not in MODES:
            raise DomainError(f"unknown mode {mode!r}")
        h = to_scalar(h, mode)
        if not h > 0:
            raise DomainError(f"lattice constant must be positive, got {h}")
        self.h = h
        self.region = region
        self.mode = mode
        sites = np.asarray(sites, dtype=np.int64).reshape(-1, DIM)
        if mode == EXACT:
            coeffs = np.asarray(coeffs)
            if coeffs.dtype.kind in "iu":
                coeffs = coeffs.astype(np.int64)
            elif coeffs.dtype != object:
                raise DomainError("exact-mode coefficients must be integers")
            scale = Fraction(scale)
        else:
            coeffs = np.asarray(coeffs, dtype=np.float64) * float(scale)
            scale = 1.0
        coeffs = coeffs.reshape(-1, DIM)
        if _sorted:
            # caller guarantees unique, sorted, admitted sites
            sites, coeffs = sp.drop_zero_rows(sites, coeffs)
        else:
            bad = ~region.admits(sites)
            if bad.any():
                raise DomainError(f"site {tuple(sites[bad][0].tolist())} lies outside region {region}")
            sites, coeffs = sp.accumulate(sites, coeffs)
        if mode == EXACT:
            g = sp.int_gcd(coeffs)
            if g == 0:
                scale = Fraction(1)
            else:
                if g != 1:
                    coeffs = coeffs // g
                    scale *= g
                if scale < 0:
                    coeffs, scale = -coeffs, -scale
            coeffs = sp.narrow(coeffs)
        sites.setflags(write=False)
        coeffs.setflags(write=False)
        self._sites = sites
        self._coeffs = coeffs
        self._scale = scale

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, h=1, region: Region = WHOLE, mode: str = EXACT) -> LatticeFunction:
        dtype = np.int64 if mode == EXACT else np.float64
        return cls(h, region, mode, sp.empty_sites(), np.zeros((0, DIM), dtype=dtype))

    @classmethod
    def from_values(cls, values: dict, h=1, region: Region = WHOLE,
                    mode: str | None = None) -> LatticeFunction:
        """Build from a mapping ``site -> Octonion``."""
        if mode is None:
            modes = {v.mode for v in values.values()}
            if len(modes) > 1:
                raise DomainError("exact and float values mixed in one function")
            mode = modes.pop() if modes else EXACT
        sites = np.array([as_index(m) for m in values], dtype=np.int64).reshape(-1, DIM)
        dup = sp.find_duplicate(sites)
        if dup is not None:
            raise DomainError(f"duplicate site {tuple(dup.tolist())}")
        octs = list(values.values())
        for v in octs:
            if v.mode != mode:
                raise DomainError("value mode does not match function mode")
        if mode == FLOAT:
            coeffs = np.array([v.coeffs for v in octs], dtype=np.float64).reshape(-1, DIM)
            return cls(h, region, mode, sites, coeffs)
        flat = [c for v in octs for c in v.coeffs]
        den = _fraction_scale(flat)
        nums = np.array([int(c * den) for c in flat], dtype=object).reshape(-1, DIM)
        return cls(h, region, mode, sites, sp.narrow(nums), Fraction(1, den))

    def _like(self, sites, coeffs, scale=1, _sorted=False) -> LatticeFunction:
        return LatticeFunction(self.h, self.region, self.mode, sites, coeffs, scale, _sorted=_sorted)

    # -- access -------------------------------------------------------------

    @property
    def sites(self) -> np.ndarray:
        return self._sites

    @property
    def coeff_array(self) -> np.ndarray:
        """Raw stored coefficients; actual values are ``coeff_array * scale``."""
        return self._coeffs

    @property
    def scale(self) -> Scalar:
        return self._scale

    def __len__(self) -> int:
        return len(self._sites)

    def is_zero(self) -> bool:
        return len(self._sites) == 0

    def _octonion(self, row) -> Octonion:
        if self.mode == EXACT:
            return Octonion([int(c) * self._scale for c in row], EXACT)
        return Octonion([float(c) for c in row], FLOAT)

    def value(self, m: Sequence[int]) -> Octonion:
        """Value at site ``m``; zero outside the support."""
        row = sp.lookup(self._sites, as_index(m))
        if row is None:
            return Octonion.zero(self.mode)
        return self._octonion(self._coeffs[row])

    __getitem__ = value

    def support(self) -> list[MultiIndex]:
        return [tuple(r) for r in self._sites.tolist()]

    def items(self) -> Iterator[tuple[MultiIndex, Octonion]]:
        """Pairs ``(site, value)`` in lexicographic site order."""
        for site, row in zip(self._sites.tolist(), self._coeffs):
            yield tuple(site), self._octonion(row)

    def component(self, k: int) -> dict[MultiIndex, Scalar]:
        """Real coefficient of ``e_k`` at every support site where it is nonzero."""
        out = {}
        for site, c in zip(self._sites.tolist(), self._coeffs[:, k]):
            if c:
                out[tuple(site)] = int(c) * self._scale if self.mode == EXACT else float(c)
        return out

    def max_abs(self) -> Scalar:
        """Largest absolute coefficient over all sites and components."""
        m = sp.max_abs(self._coeffs)
        return m * self._scale if self.mode == EXACT else float(m)

    def bounding_box(self) -> Region | None:
        if self.is_zero():
            return None
        return Region.box(self._sites.min(axis=0), self._sites.max(axis=0))

    # -- algebra ------------------------------------------------------------

    def _check_compatible(self, other: LatticeFunction) -> None:
        if not isinstance(other, LatticeFunction):
            raise TypeError(f"expected LatticeFunction, got {type(other).__name__}")
        if self.mode != other.mode:
            raise DomainError(f"mode mismatch: {self.mode} vs {other.mode}")
        if self.h != other.h:
            raise DomainError(f"lattice constant mismatch: {self.h} vs {other.h}")
        if self.region != other.region:
            raise DomainError(f"region mismatch: {self.region} vs {other.region}")

    def combine(self, other: LatticeFunction, a=1, b=1) -> LatticeFunction:
        """``a * self + b * other`` for real scalars ``a``, ``b``."""
        self._check_compatible(other)
        a = to_scalar(a, self.mode)
        b = to_scalar(b, self.mode)
        parts = [(self._sites, self._coeffs, self._scale * a),
                 (other._sites, other._coeffs, other._scale * b)]
        sites, coeffs, scale = merge_scaled(parts, self.mode)
        return self._like(sites, coeffs, scale)

    def __add__(self, other: LatticeFunction) -> LatticeFunction:
        return self.combine(other, 1, 1)

    def __sub__(self, other: LatticeFunction) -> LatticeFunction:
        return self.combine(other, 1, -1)

    def __neg__(self) -> LatticeFunction:
        return self.scaled(-1)

    def scaled(self, lam) -> LatticeFunction:
        lam = to_scalar(lam, self.mode)
        if self.mode == EXACT:
            if lam == 0:
                return LatticeFunction.zero(self.h, self.region, self.mode)
            return self._like(self._sites, self._coeffs, self._scale * lam, _sorted=True)
        return self._like(self._sites, self._coeffs * lam, _sorted=True)

    def __rmul__(self, lam) -> LatticeFunction:
        if isinstance(lam, Octonion):
            return self.left_mul(lam)
        return self.scaled(lam)

    def __mul__(self, c) -> LatticeFunction:
        if isinstance(c, Octonion):
            return self.right_mul(c)
        return self.scaled(c)

    def right_mul(self, c: Octonion) -> LatticeFunction:
        """Sitewise ``f(m) * c``."""
        return self._const_mul(c, right=True)

    def left_mul(self, c: Octonion) -> LatticeFunction:
        """Sitewise ``c * f(m)``."""
        return self._const_mul(c, right=False)

    def _const_mul(self, c: Octonion, right: bool) -> LatticeFunction:
        if c.mode != self.mode:
            raise DomainError("constant and function modes differ")
        if self.mode == EXACT:
            den = _fraction_scale(c.coeffs)
            cn = [int(x * den) for x in c.coeffs]
            scale = self._scale / den
        else:
            cn = list(c.coeffs)
            scale = 1.0
        mat = [[0] * DIM for _ in range(DIM)]
        for i in range(DIM):
            for k in range(DIM):
                if right:
                    mat[i][MUL_INDEX[i, k]] += MUL_SIGN[i, k] * cn[k]
                else:
                    mat[i][MUL_INDEX[k, i]] += MUL_SIGN[k, i] * cn[k]
        if self.mode == EXACT:
            bound = DIM * sp.max_abs(self._coeffs) * max(abs(x) for x in cn)
            coeffs = sp.widen(self._coeffs, bound)
        else:
            coeffs = self._coeffs
        out = sp.apply_matrix(coeffs, np.array(mat, dtype=object if coeffs.dtype == object else np.int64)
                              if self.mode == EXACT else np.array(mat, dtype=np.float64))
        return LatticeFunction(self.h, self.region, self.mode, self._sites, out, scale, _sorted=True)

    def restrict(self, mask_fn) -> LatticeFunction:
        keep = mask_fn(self._sites)
        return self._like(self._sites[keep], self._coeffs[keep], self._scale, _sorted=True)

    def with_region(self, region: Region) -> LatticeFunction:
        """Same values under another region (raises if a site is not admitted)."""
        return LatticeFunction(self.h, region, self.mode, self._sites, self._coeffs, self._scale)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeFunction):
            return NotImplemented
        return (
            self.mode == other.mode
            and self.h == other.h
            and self.region == other.region
            and self._scale == other._scale
            and np.array_equal(self._sites, other._sites)
            and np.array_equal(self._coeffs, other._coeffs)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (f"LatticeFunction(h={format_scalar(self.h)}, region={self.region}, "
                f"mode={self.mode}, sites={len(self)})")


def merge_scaled(parts, mode: str):
    """Sum of ``coeffs * scale`` pieces as canonical ``(sites, coeffs, scale)``.

    Exact scales are brought to a common rational so the sum stays in integers.
    """
    parts = [p for p in parts if len(p[0]) and p[2] != 0]
    if not parts:
        dtype = np.int64 if mode == EXACT else np.float64
        return sp.empty_sites(), np.zeros((0, DIM), dtype=dtype), 1
    if mode == FLOAT:
        sites = np.concatenate([p[0] for p in parts])
        coeffs = np.concatenate([np.asarray(p[1], dtype=np.float64) * float(p[2]) for p in parts])
        return sites, coeffs, 1.0
    scales = [Fraction(p[2]) for p in parts]
    num = 0
    for s in scales:
        num = gcd(num, s.numerator)
    common = Fraction(num, lcm(*(s.denominator for s in scales)))
    mults = [int(s / common) for s in scales]
    bound = sum(abs(m) * sp.max_abs(p[1]) for m, p in zip(mults, parts))
    pieces = []
    for m, p in zip(mults, parts):
        c = sp.widen(p[1], bound)
        pieces.append(c * m if m != 1 else c)
    return np.concatenate([p[0] for p in parts]), np.concatenate(pieces), common


# --------------------------------------------------------------------------
# generators


def delta(site: Sequence[int] = (0,) * DIM, h=1, region: Region = WHOLE,
          mode: str = EXACT, value: Octonion | None = None) -> LatticeFunction:
    """``value`` (default ``e0``) at ``site``, zero elsewhere."""
    value = value if value is not None else Octonion.basis(0, mode)
    return LatticeFunction.from_values({as_index(site): value}, h, region, mode)


def linear(axis: int, coeff: Octonion, box: Region, h=1,
           region: Region | None = None) -> LatticeFunction:
    """``f(mh) = (m[axis] h) coeff`` on ``box``; zero outside."""
    return linear_combination([(axis, coeff)], box, h, region)


def linear_combination(terms, box: Region, h=1,
                       region: Region | None = None) -> LatticeFunction:
    """``f(mh) = sum (m[axis] h) coeff`` over ``(axis, coeff)`` terms, on ``box``."""
    if box.kind != "box":
        raise DomainError("linear functions are truncated to a box region")
    terms = list(terms)
    if not terms:
        raise DomainError("at least one (axis, coeff) term is required")
    mode = terms[0][1].mode
    for axis, coeff in terms:
        if not 0 <= axis < DIM:
            raise DomainError(f"axis must lie in 0..7, got {axis}")
        if coeff.mode != mode:
            raise DomainError("coefficient modes differ")
    region = region if region is not None else box
    h = to_scalar(h, mode)
    sites = box.sites()
    if region != box:
        sites = sites[region.admits(sites)]
    if mode == EXACT:
        den = _fraction_scale([c for _, coeff in terms for c in coeff.coeffs])
        mat = np.zeros((DIM, DIM), dtype=object)
        for axis, coeff in terms:
            mat[axis] += np.array([int(c * den) for c in coeff.coeffs], dtype=object)
        reach = max(max(abs(a), abs(b)) for a, b in zip(box.lo, box.hi))
        bound = max(reach, 1) * int(np.abs(mat).sum(axis=0).max())
        if bound < sp.INT_LIMIT:
            coeffs = sp.apply_matrix(sites, mat.astype(np.int64))
        else:
            coeffs = sites.astype(object) @ mat
        return LatticeFunction(h, region, mode, sites, coeffs, h / den, _sorted=True)
    mat = np.zeros((DIM, DIM))
    for axis, coeff in terms:
        mat[axis] += np.array(coeff.coeffs, dtype=np.float64) * h
    return LatticeFunction(h, region, mode, sites, sites @ mat, _sorted=True)


def random_function(box: Region, seed, h=1, mode: str = EXACT,
                    region: Region = WHOLE) -> LatticeFunction:
    """Seeded pseudo-random values at every site of ``box`` admitted by ``region``.

    Exact mode draws integers in [-9, 9]; float mode draws uniform values
    in [-1, 1).  ``seed`` is anything :func:`numpy.random.default_rng` accepts.
    """
    if box.kind != "box":
        raise DomainError("random functions are generated on a box")
    rng = np.random.default_rng(seed)
    sites = box.sites()
    if mode == EXACT:
        coeffs = rng.integers(-9, 10, size=sites.shape, dtype=np.int64)
    elif mode == FLOAT:
        coeffs = rng.uniform(-1.0, 1.0, size=sites.shape)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    keep = region.admits(sites)
    return LatticeFunction(h, region, mode, sites[keep], coeffs[keep], _sorted=True)


# --------------------------------------------------------------------------
# text files

_HEADER = re.compile(r"h=(\S+)\s+region=(whole|upper|lower|box\s+\S+\.\.\S+)\s+mode=(exact|float)")


def format_function(f: LatticeFunction) -> str:
    lines = [f"h={format_scalar(f.h)} region={f.region} mode={f.mode}"]
    for site, value in f.items():
        lines.append(" ".join(map(str, site)) + " : " + " ".join(value.to_strings()))
    return "\n".join(lines) + "\n"


def parse_function(text: str) -> LatticeFunction:
    lines = text.splitlines()
    header_no = next((n for n, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")), None)
    if header_no is None:
        raise ParseError("missing header line", 1)
    m = _HEADER.fullmatch(lines[header_no].strip())
    if not m:
        raise ParseError(f"bad header {lines[header_no]!r}", header_no + 1)
    mode = m.group(3)
    h = parse_scalar(m.group(1), mode, line=header_no + 1)
    try:
        region = Region.parse(m.group(2))
    except ParseError as exc:
        raise ParseError(str(exc), header_no + 1) from exc
    values: dict[MultiIndex, Octonion] = {}
    for n in range(header_no + 1, len(lines)):
        line = lines[n].strip()
        if not line or line.startswith("#"):
            continue
        lineno = n + 1
        if line.count(":") != 1:
            raise ParseError("expected 'm0 .. m7 : c0 .. c7'", lineno)
        left, right = line.split(":")
        try:
            site = tuple(int(x) for x in left.split())
        except ValueError as exc:
            raise ParseError(f"bad site coordinates {left.strip()!r}", lineno) from exc
        toks = right.split()
        if len(site) != DIM or len(toks) != DIM:
            raise ParseError("a site line needs 8 coordinates and 8 coefficients", lineno)
        if site in values:
            raise ParseError(f"duplicate site {site}", lineno)
        if not region.admits(np.array([site], dtype=np.int64))[0]:
            raise ParseError(f"site {site} lies outside region {region}", lineno)
        values[site] = Octonion([parse_scalar(t, mode, line=lineno) for t in toks], mode)
    return LatticeFunction.from_values(values, h, region, mode)


def write_function(path: Union[str, Path], f: LatticeFunction) -> None:
    Path(path).write_text(format_function(f))


def read_function(path: Union[str, Path]) -> LatticeFunction:
    return parse_function(Path(path).read_text())
