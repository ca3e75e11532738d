"""Seeded experiment suites behind the command-line interface.

Each ``run_*`` function returns ``(passed, report_dict)``; the CLI turns
that into JSON, an optional CSV summary, and an exit code.
"""
from __future__ import annotations

import csv
import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import algebra as alg
from .algebra import EXACT, FLOAT, Octonion, associator, basis_mul, format_scalar, mul, norm_sq
from .errors import DomainError
from .lattice import LatticeFunction, Region, linear_combination, random_function
from .operators import (
    LEFT_BACKWARD,
    RIGHT_BACKWARD,
    apply_cr,
    factorization_residual,
    is_monogenic,
    residual_check,
)
from .stokes import MINUS, THEOREM_REGIONS, IdentityReport, theorem_report

MAX_RADIUS = 3

# Octonion multiplication table as printed: row e_i, column e_j.
REFERENCE_TABLE = (
    ("1", "e1", "e2", "e3", "e4", "e5", "e6", "e7"),
    ("e1", "-1", "e4", "e5", "-e2", "-e3", "-e7", "e6"),
    ("e2", "-e4", "-1", "e6", "e1", "e7", "-e3", "-e5"),
    ("e3", "-e5", "-e6", "-1", "-e7", "e1", "e2", "e4"),
    ("e4", "e2", "-e1", "e7", "-1", "-e6", "e5", "-e3"),
    ("e5", "e3", "-e7", "-e1", "e6", "-1", "-e4", "e2"),
    ("e6", "e7", "e3", "-e2", "-e5", "e4", "-1", "-e1"),
    ("e7", "-e6", "e5", "-e4", "e3", "-e2", "e1", "-1"),
)


def parse_entry(text: str) -> tuple[int, int]:
    """``"-e5"`` -> ``(-1, 5)``; ``"1"`` -> ``(1, 0)``."""
    sign = -1 if text.startswith("-") else 1
    body = text.lstrip("-")
    return sign, 0 if body == "1" else int(body[1:])


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


# --------------------------------------------------------------------------
# algebra


def check_table(sign: np.ndarray = alg.MUL_SIGN, index: np.ndarray = alg.MUL_INDEX) -> Check:
    bad = []
    for i, j in itertools.product(range(8), repeat=2):
        if (int(sign[i, j]), int(index[i, j])) != parse_entry(REFERENCE_TABLE[i][j]):
            bad.append((i, j))
    if bad:
        i, j = bad[0]
        return Check("table", False, f"{len(bad)} entries differ; first at (i,j)=({i},{j}): "
                                     f"got {int(sign[i, j])}*e{int(index[i, j])}, expected {REFERENCE_TABLE[i][j]}")
    return Check("table", True, "64/64 products match")


def check_units() -> Check:
    for i in range(8):
        if basis_mul(0, i) != (1, i) or basis_mul(i, 0) != (1, i):
            return Check("units", False, f"e0 is not an identity for e{i}")
    for i in range(1, 8):
        if basis_mul(i, i) != (-1, 0):
            return Check("units", False, f"e{i}^2 != -1")
        for j in range(1, 8):
            if i != j:
                s1, k1 = basis_mul(i, j)
                s2, k2 = basis_mul(j, i)
                if k1 != k2 or s1 != -s2:
                    return Check("units", False, f"e{i} e{j} != -e{j} e{i}")
    return Check("units", True, "identity, squares and anticommutativity hold")


def random_octonion(rng: np.random.Generator) -> Octonion:
    nums = rng.integers(-20, 21, size=8)
    dens = rng.integers(1, 10, size=8)
    return Octonion([Fraction(int(n), int(d)) for n, d in zip(nums, dens)])


def _basis() -> list[Octonion]:
    return [Octonion.basis(i) for i in range(8)]


def check_alternative(samples: int, rng) -> Check:
    pairs = [(a, b) for a in _basis() for b in _basis()]
    pairs += [(random_octonion(rng), random_octonion(rng)) for _ in range(samples)]
    for a, b in pairs:
        if mul(a, mul(a, b)) != mul(mul(a, a), b) or mul(mul(a, b), b) != mul(a, mul(b, b)):
            return Check("alternativity", False, f"fails for a={a}, b={b}")
    return Check("alternativity", True, f"{len(pairs)} pairs")


def check_moufang(samples: int, rng) -> Check:
    triples = list(itertools.product(_basis(), repeat=3))
    triples += [tuple(random_octonion(rng) for _ in range(3)) for _ in range(samples)]
    for a, b, c in triples:
        if mul(mul(mul(a, b), c), b) != mul(a, mul(b, mul(c, b))):
            return Check("moufang", False, f"fails for a={a}, b={b}, c={c}")
    return Check("moufang", True, f"{len(triples)} triples")


def check_norm(samples: int, rng) -> Check:
    for _ in range(samples):
        a, b = random_octonion(rng), random_octonion(rng)
        ab = mul(a, b)
        if norm_sq(ab) != norm_sq(a) * norm_sq(b):
            return Check("norm", False, f"|ab|^2 != |a|^2 |b|^2 for a={a}, b={b}")
        if ab.is_zero() and not (a.is_zero() or b.is_zero()):
            return Check("norm", False, f"zero divisor pair a={a}, b={b}")
    return Check("norm", True, f"{samples} pairs")


def check_associator(samples: int, rng) -> Check:
    for _ in range(samples):
        a, b, c = (random_octonion(rng) for _ in range(3))
        base = associator(a, b, c)
        for swapped in (associator(b, a, c), associator(a, c, b), associator(c, b, a)):
            if swapped != -base:
                return Check("associator", False, f"not alternating at a={a}, b={b}, c={c}")
    return Check("associator", True, f"{samples} triples")


def check_census() -> Check:
    assoc, anti = alg.triple_census()
    e = _basis()
    for i, j, k in itertools.product(range(8), repeat=3):
        nonzero = not associator(e[i], e[j], e[k]).is_zero()
        if (alg.triple_sign(i, j, k) == -1) != nonzero:
            return Check("census", False, f"sign/associator disagree at ({i},{j},{k})")
    ok = (assoc, anti) == (344, 168)
    return Check("census", ok, f"associative={assoc} anti_associative={anti}")


def run_verify_algebra(samples: int = 100, seed: int = 0,
                       table: tuple[np.ndarray, np.ndarray] | None = None) -> tuple[bool, dict]:
    rng = np.random.default_rng(seed)
    checks = [check_table(*(table or (alg.MUL_SIGN, alg.MUL_INDEX))), check_units()]
    checks.append(check_alternative(samples, rng))
    checks.append(check_moufang(samples, rng))
    if samples > 0:
        checks.append(check_norm(10 * samples, rng))
        checks.append(check_associator(samples, rng))
    checks.append(check_census())
    passed = all(c.passed for c in checks)
    return passed, {"command": "verify-algebra", "samples": samples, "seed": seed,
                    "passed": passed, "checks": [c.to_dict() for c in checks]}


def run_census() -> tuple[bool, dict]:
    assoc, anti = alg.triple_census()
    lines = sorted({tuple(sorted(t)) for t in alg.FANO_LINES})
    return True, {"command": "census", "associative": assoc, "anti_associative": anti,
                  "total": assoc + anti, "quaternionic_triples": [list(t) for t in lines]}


# --------------------------------------------------------------------------
# lattice experiments


@dataclass
class RunConfig:
    command: str
    mode: str = EXACT
    h: Any = 1
    radius: int = 1
    seed: int = 0
    seeds: int = 1
    theorem: str = "T1"
    region: str | None = None
    sign: int = MINUS
    h_power: int = 8
    tol: float | None = None
    out: str | None = None
    csv: str | None = None
    functions: Sequence[str] = ()
    force: bool = False
    multiplier: int = 3

    def __post_init__(self):
        if self.mode not in (EXACT, FLOAT):
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.mode == EXACT and self.tol is not None:
            raise DomainError("--tol is only meaningful in float mode")
        self.h = alg.to_scalar(self.h, self.mode) if not isinstance(self.h, str) \
            else alg.parse_scalar(self.h, self.mode)
        if not self.h > 0:
            raise DomainError("--h must be positive")
        if self.radius < 0:
            raise DomainError("--radius must be non-negative")
        if self.radius > MAX_RADIUS and not self.force:
            raise DomainError(f"--radius above {MAX_RADIUS} needs --force")
        if self.seeds < 1:
            raise DomainError("--seeds must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise DomainError("--seed must be an unsigned 64-bit integer")
        if self.theorem not in THEOREM_REGIONS:
            raise DomainError(f"unknown theorem {self.theorem!r}")
        if self.region is not None and Region(self.region) != THEOREM_REGIONS[self.theorem] \
                and self.command == "stokes":
            raise DomainError(f"{self.theorem} runs on region {THEOREM_REGIONS[self.theorem]}, not {self.region}")
        if self.h_power not in (7, 8):
            raise DomainError("--h-power must be 7 or 8")
        if len(self.functions) > 2:
            raise DomainError("--function may be given at most twice (g, then f)")
        if not 0 <= self.multiplier <= 7:
            raise DomainError("--multiplier must be a basis index 0..7")

    def require_tol(self) -> None:
        if self.mode == FLOAT and self.tol is None:
            raise DomainError("float mode needs an explicit --tol")

    def seed_list(self) -> list[int]:
        return [self.seed + n for n in range(self.seeds)]


def theorem_box(theorem: str, radius: int) -> Region:
    """Generation box: the full cube for T1, a slab touching ``m[7] = 0`` otherwise."""
    r = radius
    if theorem == "T1":
        return Region.cube(r)
    if theorem == "T2":
        return Region.box((-r,) * 7 + (0,), (r,) * 7 + (r,))
    return Region.box((-r,) * 7 + (-r,), (r,) * 7 + (0,))


def _max_residual(f: LatticeFunction) -> str:
    return format_scalar(f.max_abs()) if not f.is_zero() else "0"


def run_verify_factorization(cfg: RunConfig, loaded: Sequence[LatticeFunction] = ()) -> tuple[bool, dict]:
    cfg.require_tol()
    start = time.perf_counter()
    cases = []
    if loaded:
        cases = [(None, fn) for fn in loaded]
    else:
        box = Region.cube(cfg.radius)
        cases = [(s, random_function(box, s, cfg.h, cfg.mode)) for s in cfg.seed_list()]
    results = []
    for s, fn in cases:
        res = factorization_residual(fn)
        ok = res.is_zero() if fn.mode == EXACT else (res.is_zero() or res.max_abs() <= cfg.tol)
        results.append({"seed": s, "sites": len(fn), "residual_sites": len(res),
                        "max_residual": _max_residual(res), "passed": bool(ok)})
    passed = all(r["passed"] for r in results)
    return passed, {
        "command": "verify-factorization", "mode": cfg.mode, "h": format_scalar(cfg.h),
        "radius": cfg.radius, "tol": cfg.tol, "passed": passed, "results": results,
        "elapsed_ms": round((time.perf_counter() - start) * 1000.0, 3),
    }


def run_stokes(cfg: RunConfig, loaded: Sequence[LatticeFunction] = ()) -> tuple[bool, dict, list[IdentityReport]]:
    cfg.require_tol()
    region = THEOREM_REGIONS[cfg.theorem]
    reports = []
    if loaded:
        g = loaded[0]
        f = loaded[-1]
        if g.region != region or f.region != region:
            raise DomainError(f"{cfg.theorem} needs functions on region {region}")
        reports.append(theorem_report(g, f, cfg.theorem, sign=cfg.sign, h_power=cfg.h_power))
    else:
        box = theorem_box(cfg.theorem, cfg.radius)
        for s in cfg.seed_list():
            g = random_function(box, (s, 0), cfg.h, cfg.mode, region)
            f = random_function(box, (s, 1), cfg.h, cfg.mode, region)
            reports.append(theorem_report(g, f, cfg.theorem, sign=cfg.sign,
                                          h_power=cfg.h_power, seed=s, box=box))
    passed = all(r.derived_ok(cfg.tol) for r in reports)
    doc = {"command": "stokes", "theorem": cfg.theorem, "passed": passed,
           "reports": [r.to_dict() for r in reports]}
    return passed, doc, reports


def write_stokes_csv(path: str | Path, reports: Sequence[IdentityReport], tol=None) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["seed", "theorem", "region", "sign", "h", "h_power", "mode",
                    "claim_residual", "derived_residual", "derived_ok", "site_count"])
        for r in reports:
            w.writerow([r.seed, r.theorem, str(r.region), r.sign, format_scalar(r.h), r.h_power, r.mode,
                        " ".join(r.claim_residual.to_strings()),
                        " ".join(r.derived_residual.to_strings()),
                        r.derived_ok(tol), r.site_count])


def monogenic_pair(h=1, radius: int = 2, multiplier: int = 3, mode: str = EXACT):
    """Discrete ``f = x1 - x2 e4`` on a box and ``g = f e_multiplier``."""
    box = Region.cube(radius)
    f = linear_combination([(1, Octonion.basis(0, mode)), (2, -Octonion.basis(4, mode))], box, h)
    return f, f.right_mul(Octonion.basis(multiplier, mode))


def uniform_value(f) -> Octonion | None:
    """The common value of ``f`` when every stored site holds the same octonion."""
    if f.is_zero():
        return None
    c = f.coeff_array
    if not (c == c[0]).all():
        return None
    return f.value(tuple(f.sites[0].tolist()))


def run_monogenic_demo(cfg: RunConfig) -> tuple[bool, dict]:
    if cfg.mode != EXACT:
        raise DomainError("monogenic-demo runs in exact mode")
    f, g = monogenic_pair(cfg.h, max(cfg.radius, 1), cfg.multiplier)
    fc = is_monogenic(f, LEFT_BACKWARD)
    dg = apply_cr(g, LEFT_BACKWARD)
    gc = residual_check(dg)
    interior = f.region.interior_box()
    uniform = uniform_value(dg) if len(dg) == interior.size() else None
    right_differs = apply_cr(f, LEFT_BACKWARD) != apply_cr(f, RIGHT_BACKWARD)
    expected_g_monogenic = cfg.multiplier == 0
    passed = bool(fc.monogenic) and gc.monogenic == expected_g_monogenic
    return passed, {
        "command": "monogenic-demo",
        "h": format_scalar(cfg.h),
        "radius": max(cfg.radius, 1),
        "multiplier": f"e{cfg.multiplier}",
        "f": {"monogenic": fc.monogenic, "max_residual": fc.max_residual.to_strings()},
        "g": {"monogenic": gc.monogenic, "max_residual": gc.max_residual.to_strings(),
              "nonzero_sites": len(dg),
              "uniform_value": None if uniform is None else uniform.to_strings()},
        "left_right_differ_on_f": right_differs,
        "passed": passed,
    }
