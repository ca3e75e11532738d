"""Octonion arithmetic over exact rationals or double-precision floats.

The multiplication is generated from the seven oriented lines of the Fano
plane read off the classical table (``e1 e2 = e4``, ``e1 e3 = e5``,
``e2 e3 = e6``, ``e4 e3 = e7``, ...).  Every product of two basis units is a
signed basis unit, so all products are table lookups.

Coefficients are either :class:`fractions.Fraction` ("exact" mode) or
``float`` ("float" mode).  The two are never mixed inside one value.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DomainError, ParseError

Scalar = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

#: Oriented quaternionic triples (a, b, c) with e_a e_b = e_c.
FANO_LINES = (
    (1, 2, 4),
    (1, 3, 5),
    (2, 3, 6),
    (4, 3, 7),
    (1, 7, 6),
    (2, 5, 7),
    (4, 6, 5),
)


def _build_table(lines: Iterable[tuple[int, int, int]]) -> tuple[np.ndarray, np.ndarray]:
    sign = np.zeros((8, 8), dtype=np.int64)
    index = np.zeros((8, 8), dtype=np.int64)
    for i in range(8):
        sign[0, i] = sign[i, 0] = 1
        index[0, i] = index[i, 0] = i
    for i in range(1, 8):
        sign[i, i] = -1
        index[i, i] = 0
    for a, b, c in lines:
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            sign[x, y], index[x, y] = 1, z
            sign[y, x], index[y, x] = -1, z
    if np.any(sign == 0):
        raise DomainError("Fano lines do not cover every pair of imaginary units")
    sign.setflags(write=False)
    index.setflags(write=False)
    return sign, index


#: ``e_i e_j = MUL_SIGN[i, j] * e_{MUL_INDEX[i, j]}``
MUL_SIGN, MUL_INDEX = _build_table(FANO_LINES)


def basis_mul(i: int, j: int) -> tuple[int, int]:
    """Return ``(sign, index)`` with ``e_i e_j = sign * e_index``."""
    if not (0 <= i <= 7 and 0 <= j <= 7):
        raise DomainError(f"basis indices must lie in 0..7, got ({i}, {j})")
    return int(MUL_SIGN[i, j]), int(MUL_INDEX[i, j])


# --------------------------------------------------------------------------
# scalars


def to_scalar(value, mode: str) -> Scalar:
    """Coerce ``value`` into the scalar type of ``mode``."""
    if mode == EXACT:
        if isinstance(value, float):
            raise DomainError("float value in exact mode")
        return Fraction(value)
    if mode == FLOAT:
        return float(value)
    raise DomainError(f"unknown mode {mode!r}")


def scalar_mode(value) -> str:
    if isinstance(value, (float, np.floating)):
        return FLOAT
    if isinstance(value, (int, Fraction, np.integer)):
        return EXACT
    raise DomainError(f"not a scalar: {value!r}")


def format_scalar(value: Scalar) -> str:
    """Render ``p/q`` for rationals (integers bare) and 17 significant digits for floats."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def parse_scalar(text: str, mode: str, *, line: int | None = None) -> Scalar:
    """Parse one scalar token; rationals must be in reduced form with positive denominator."""
    try:
        if mode == FLOAT:
            return float(text)
        if "/" in text:
            num_s, den_s = text.split("/")
            num, den = int(num_s), int(den_s)
            if den <= 0:
                raise ParseError(f"non-positive denominator in {text!r}", line)
            value = Fraction(num, den)
            if value.denominator != den:
                raise ParseError(f"rational {text!r} is not in reduced form", line)
            if den == 1:
                raise ParseError(f"rational {text!r} has unit denominator; write it as an integer", line)
            return value
        return Fraction(int(text))
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(f"bad {mode} scalar {text!r}", line) from exc


# --------------------------------------------------------------------------
# octonions


class Octonion:
    """Immutable octonion ``c[0] e0 + ... + c[7] e7``."""

    __slots__ = ("_c", "_mode")

    def __init__(self, coeffs: Sequence = (0,) * 8, mode: str | None = None):
        coeffs = tuple(coeffs)
        if len(coeffs) != 8:
            raise DomainError(f"an octonion has 8 coefficients, got {len(coeffs)}")
        if mode is None:
            modes = {scalar_mode(c) for c in coeffs}
            if len(modes) > 1:
                raise DomainError("exact and float coefficients mixed in one octonion")
            mode = modes.pop()
        self._mode = mode
        self._c = tuple(to_scalar(c, mode) for c in coeffs)

    @classmethod
    def basis(cls, i: int, mode: str = EXACT) -> Octonion:
        if not 0 <= i <= 7:
            raise DomainError(f"basis index must lie in 0..7, got {i}")
        c = [0] * 8
        c[i] = 1
        return cls(c, mode)

    @classmethod
    def zero(cls, mode: str = EXACT) -> Octonion:
        return cls((0,) * 8, mode)

    @classmethod
    def real(cls, value, mode: str | None = None) -> Octonion:
        return cls((value,) + (0,) * 7, mode)

    @property
    def coeffs(self) -> tuple[Scalar, ...]:
        return self._c

    @property
    def mode(self) -> str:
        return self._mode

    def __getitem__(self, i: int) -> Scalar:
        return self._c[i]

    def __iter__(self):
        return iter(self._c)

    def _check(self, other: Octonion) -> None:
        if not isinstance(other, Octonion):
            raise TypeError(f"expected Octonion, got {type(other).__name__}")
        if other._mode != self._mode:
            raise DomainError("exact and float octonions mixed in one computation")

    def __add__(self, other: Octonion) -> Octonion:
        self._check(other)
        return Octonion([a + b for a, b in zip(self._c, other._c)], self._mode)

    def __sub__(self, other: Octonion) -> Octonion:
        self._check(other)
        return Octonion([a - b for a, b in zip(self._c, other._c)], self._mode)

    def __neg__(self) -> Octonion:
        return Octonion([-a for a in self._c], self._mode)

    def __mul__(self, other):
        if isinstance(other, Octonion):
            return mul(self, other)
        if not isinstance(other, (int, float, Fraction, np.integer, np.floating)):
            return NotImplemented
        s = to_scalar(other, self._mode)
        return Octonion([a * s for a in self._c], self._mode)

    def __rmul__(self, other):
        if not isinstance(other, (int, float, Fraction, np.integer, np.floating)):
            return NotImplemented
        s = to_scalar(other, self._mode)
        return Octonion([s * a for a in self._c], self._mode)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Octonion):
            return NotImplemented
        return self._mode == other._mode and self._c == other._c

    def __hash__(self) -> int:
        return hash((self._mode, self._c))

    def is_zero(self) -> bool:
        return not any(self._c)

    def close_to(self, other: Octonion, tol: float) -> bool:
        """Componentwise comparison with an explicit absolute tolerance."""
        self._check(other)
        return max_abs(self - other) <= tol

    def conj(self) -> Octonion:
        return conj(self)

    def norm_sq(self) -> Scalar:
        return norm_sq(self)

    def to_strings(self) -> list[str]:
        return [format_scalar(c) for c in self._c]

    def __str__(self) -> str:
        return " ".join(self.to_strings())

    def __repr__(self) -> str:
        return f"Octonion([{', '.join(self.to_strings())}], {self._mode!r})"


def mul(a: Octonion, b: Octonion) -> Octonion:
    """Bilinear extension of :func:`basis_mul`."""
    a._check(b)
    out = [a._c[0] * 0] * 8
    for i, x in enumerate(a._c):
        if not x:
            continue
        for j, y in enumerate(b._c):
            if not y:
                continue
            k = MUL_INDEX[i, j]
            if MUL_SIGN[i, j] > 0:
                out[k] = out[k] + x * y
            else:
                out[k] = out[k] - x * y
    return Octonion(out, a._mode)


def conj(a: Octonion) -> Octonion:
    return Octonion((a._c[0],) + tuple(-x for x in a._c[1:]), a._mode)


def norm_sq(a: Octonion) -> Scalar:
    return sum((x * x for x in a._c), a._c[0] * 0)


def max_abs(a: Octonion) -> Scalar:
    return max(abs(x) for x in a._c)


def associator(a: Octonion, b: Octonion, c: Octonion) -> Octonion:
    """``(ab)c - a(bc)``."""
    return mul(mul(a, b), c) - mul(a, mul(b, c))


def triple_sign(i: int, j: int, k: int) -> int:
    """Sign ``s`` with ``(e_i e_j) e_k = s * e_i (e_j e_k)``."""
    s1, ij = basis_mul(i, j)
    s2, left = basis_mul(ij, k)
    s3, jk = basis_mul(j, k)
    s4, right = basis_mul(i, jk)
    assert left == right
    return (s1 * s2) * (s3 * s4)


def triple_census() -> tuple[int, int]:
    """Count ordered basis triples that associate and that anti-associate."""
    signs = [triple_sign(i, j, k) for i, j, k in itertools.product(range(8), repeat=3)]
    anti = signs.count(-1)
    return len(signs) - anti, anti


def _triple_tables() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # LEFT[i,j,k] * e_IDX = (e_i e_j) e_k ; RIGHT[i,j,k] * e_IDX = e_i (e_j e_k)
    left = np.zeros((8, 8, 8), dtype=np.int64)
    right = np.zeros((8, 8, 8), dtype=np.int64)
    idx = np.zeros((8, 8, 8), dtype=np.int64)
    for i, j, k in itertools.product(range(8), repeat=3):
        ij = MUL_INDEX[i, j]
        jk = MUL_INDEX[j, k]
        left[i, j, k] = MUL_SIGN[i, j] * MUL_SIGN[ij, k]
        right[i, j, k] = MUL_SIGN[j, k] * MUL_SIGN[i, jk]
        idx[i, j, k] = MUL_INDEX[ij, k]
    for t in (left, right, idx):
        t.setflags(write=False)
    return left, right, idx


TRIPLE_LEFT, TRIPLE_RIGHT, TRIPLE_INDEX = _triple_tables()
