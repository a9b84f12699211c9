"""``stabcompile compile <config.json>``: solve, verify, report.

Exit codes: 0 accessible and verified, 2 solver ran but the result is not
accessible, 1 any error.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace

import numpy as np

from . import __version__
from .compiler import MODES, CompilationProblem, assess, random_stabilizer, solve
from .config import ConfigError, parse_config
from .pauli import hs_norm
from .report import Report, emit_report
from .sweep import permutation_sweep
from .verify import verify

EXIT_OK, EXIT_ERROR, EXIT_INACCESSIBLE = 0, 1, 2
CODESPACE_TOL = 1e-8

log = logging.getLogger("stabcompile")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stabcompile", description="Stabilizer-gauge compilation of logical Hamiltonians.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    c = sub.add_parser("compile", help="compile one JSON problem config")
    c.add_argument("config", help="problem config (JSON)")
    c.add_argument("--out", help="write the report here instead of stdout")
    c.add_argument("--mode", choices=MODES, help="override the solver mode")
    c.add_argument("--lambda", dest="lam", type=float, help="l1 weight for regularized mode")
    c.add_argument("--seed", type=int, help="seed for random corrections and sweep sampling")
    c.add_argument("--random-stabilizer", action="store_true",
                   help="add a seeded random stabilizer correction to the naive encoding")
    c.add_argument("--resolve", action="store_true",
                   help="with --random-stabilizer, re-run the solver from the corrupted start")
    c.add_argument("--sweep-permutations", action="store_true",
                   help="also re-solve under relabelings of the physical qubits")
    c.add_argument("--max-perms", type=int, default=40320, help="cap on permutations in the sweep")
    c.add_argument("-v", "--verbose", action="store_true")
    return ap


def run_compile(args: argparse.Namespace) -> tuple[int, Report | None]:
    t0 = time.perf_counter()
    try:
        cfg = parse_config(args.config)
        p: CompilationProblem = cfg.problem
        if args.mode is not None:
            p = replace(p, mode=args.mode)
        if args.lam is not None:
            p = replace(p, lam=args.lam)
        seed = cfg.seed if args.seed is None else args.seed
        naive = p.naive

        if args.random_stabilizer:
            p = replace(p, start=naive + random_stabilizer(p.code, seed))
            result = solve(p) if args.resolve else assess(p)
        else:
            if args.resolve:
                raise ValueError("--resolve requires --random-stabilizer")
            result = solve(p)
        log.info("mode=%s residual=%.3e accessible=%s", result.mode, result.residual, result.accessible)

        check = verify(p.code, result.h_total, p.h_logical, p.accessible)
        sweep = None
        if args.sweep_permutations:
            sweep = [[list(perm), res] for perm, res in permutation_sweep(p, args.max_perms, seed)]

        provenance = {
            "config_hash": cfg.config_hash,
            "seed": seed,
            "version": __version__,
            "code": p.code.name or "custom",
            "n": p.code.n,
            "k": p.code.k,
            "accessible_dim": p.accessible.dim,
            "generators": list(cfg.generator_labels),
            "random_stabilizer": bool(args.random_stabilizer),
            "resolve": bool(args.resolve),
        }
        report = Report.from_result(result, check, provenance,
                                    correction_norm=hs_norm(result.h_total - naive),
                                    total_time=time.perf_counter() - t0, sweep=sweep)
        if args.out:
            emit_report(report, args.out)
        else:
            sys.stdout.write(report.dumps())
    except (ConfigError, ValueError, OSError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR, None

    if not result.accessible:
        return EXIT_INACCESSIBLE, report
    if check.codespace_error > CODESPACE_TOL:
        print(f"error: codespace action check failed ({check.codespace_error:.3e})", file=sys.stderr)
        return EXIT_ERROR, report
    return EXIT_OK, report


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        code, _ = run_compile(args)
    except Exception as exc:  # last-resort guard: report, never traceback
        print(f"error: unexpected failure: {exc!r}", file=sys.stderr)
        return EXIT_ERROR
    return code


if __name__ == "__main__":
    sys.exit(main())
