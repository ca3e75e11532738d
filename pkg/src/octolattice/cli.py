"""Command-line entry point: ``octolattice <command> [options]``.

Exit codes: 0 success, 1 an identity check failed, 2 usage or
configuration error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .errors import DomainError, ParseError
from .harness import (
    RunConfig,
    run_census,
    run_monogenic_demo,
    run_stokes,
    run_verify_algebra,
    run_verify_factorization,
    write_stokes_csv,
)
from .lattice import read_function

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--h", default="1", help="lattice constant (rational in exact mode)")
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    p.add_argument("--tol", type=float, default=None, help="float-mode tolerance")
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    p.add_argument("--function", dest="functions", action="append", default=[],
                   help="load a function file instead of generating (repeat for g then f)")
    p.add_argument("--force", action="store_true", help="allow radius above 3")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="octolattice", description="Discrete octonionic analysis checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify-algebra", help="multiplication table and algebra identities")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("census", help="count associating and anti-associating basis triples")
    p.add_argument("--out", default=None)

    p = sub.add_parser("verify-factorization", help="star-Laplacian factorization residuals")
    _common(p)

    p = sub.add_parser("stokes", help="discrete Stokes formula reports")
    _common(p)
    p.add_argument("--theorem", choices=("T1", "T2", "T3"), default="T1")
    p.add_argument("--region", choices=("whole", "upper", "lower"), default=None)
    p.add_argument("--sign", choices=("plus", "minus"), default="minus")
    p.add_argument("--h-power", type=int, choices=(7, 8), default=8)
    p.add_argument("--csv", default=None, help="one summary row per seed")

    p = sub.add_parser("monogenic-demo", help="kernel of D- is not closed under right multiplication")
    _common(p)
    p.set_defaults(radius=2)
    p.add_argument("--multiplier", type=int, default=3, help="basis index of the right multiplier")
    return parser


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        mode=args.mode,
        h=args.h,
        radius=args.radius,
        seed=args.seed,
        seeds=args.seeds,
        theorem=getattr(args, "theorem", "T1"),
        region=getattr(args, "region", None),
        sign=1 if getattr(args, "sign", "minus") == "plus" else -1,
        h_power=getattr(args, "h_power", 8),
        tol=args.tol,
        out=args.out,
        csv=getattr(args, "csv", None),
        functions=args.functions,
        force=args.force,
        multiplier=getattr(args, "multiplier", 3),
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify-algebra":
            if args.samples < 0:
                raise DomainError("--samples must be non-negative")
            passed, doc = run_verify_algebra(args.samples, args.seed)
            _emit(doc, args.out)
            return EXIT_OK if passed else EXIT_FAIL
        if args.command == "census":
            passed, doc = run_census()
            _emit(doc, args.out)
            return EXIT_OK
        cfg = _config(args)
        try:
            loaded = [read_function(p) for p in cfg.functions]
        except (OSError, ParseError) as exc:
            print(f"octolattice: cannot load function: {exc}", file=sys.stderr)
            return EXIT_IO
        if args.command == "verify-factorization":
            passed, doc = run_verify_factorization(cfg, loaded)
        elif args.command == "stokes":
            passed, doc, reports = run_stokes(cfg, loaded)
            if cfg.csv:
                write_stokes_csv(cfg.csv, reports, cfg.tol)
        else:
            passed, doc = run_monogenic_demo(cfg)
        _emit(doc, cfg.out)
        return EXIT_OK if passed else EXIT_FAIL
    except (DomainError, ParseError) as exc:
        # ParseError here comes from flag values; function files are handled above
        print(f"octolattice: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"octolattice: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
