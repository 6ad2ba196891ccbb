"""Command line entry point: ``mmdesign {design,decomp,multiply,bench,verify}``.

Every command prints a few human-readable lines followed by one line of
JSON (the machine report).  Exit codes: 0 all checks passed, 1 a check
failed, 2 bad usage or unreadable input.

Random test matrices come from Python's ``random.Random(seed)`` (Mersenne
Twister): entries p/q with p uniform in [-9, 9] and q uniform in {1, 2, 3}.
The default tolerance for float checks is read from ``MMDESIGN_TOL`` (1e-9).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
import time
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bilinear import (
    MultCounter,
    UnverifiedDecompositionError,
    from_decomposition,
    matrices_equal,
    multiplication_count,
    multiply,
    naive_multiply,
    recursive_multiply,
)
from .decomp import (
    Decomposition,
    decomposition_from_json,
    decomposition_to_json,
    design_decomposition,
    strassen_reference,
    verify_decomposition,
)
from .designs import (
    SUMZERO,
    Design,
    DesignVerificationError,
    GeneratorSet,
    InvalidDesignError,
    OrbitOverflowError,
    default_tol,
    design_from_json,
    design_to_json,
    orbit_design,
    polygon_design,
    rotation_generators,
    simplex_design,
    symmetric_group_generators,
    triangle_design,
    verify_design,
)
from . import scalar as sc
from .tensor import as_matrix, as_vector

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def random_rational_matrix(rng: random.Random, N: int) -> np.ndarray:
    return as_matrix([[Fraction(rng.randint(-9, 9), rng.choice((1, 2, 3))) for _ in range(N)] for _ in range(N)], exact=True)


def random_float_matrix(rng: random.Random, N: int) -> np.ndarray:
    return np.array([[rng.uniform(-1.0, 1.0) for _ in range(N)] for _ in range(N)], dtype=complex)


def _emit(lines: Sequence[str], report: dict, out=None) -> None:
    out = out or sys.stdout
    for line in lines:
        print(line, file=out)
    print(json.dumps(report, sort_keys=True), file=out)


def _residual(x: float) -> str:
    return "0" if x == 0 else f"{x:.3g}"


def _write_json(path: str | None, obj: dict) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(obj, f, indent=1)
            f.write("\n")


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


_NAMED = re.compile(r"^(triangle|strassen|simplex(\d+)|polygon(\d+)(-exact)?)$")


def named_design(name: str) -> Design:
    """``triangle``, ``simplexN``, ``polygonM`` or ``polygonM-exact``; otherwise a JSON path."""
    m = _NAMED.match(name)
    if m and name != "strassen":
        if name == "triangle":
            return triangle_design()
        if m.group(2):
            return simplex_design(int(m.group(2)))
        return polygon_design(int(m.group(3)), exact=bool(m.group(4)))
    if os.path.exists(name):
        return design_from_json(_read_json(name))
    raise UsageError(f"unknown design {name!r}")


def named_decomposition(name: str) -> Decomposition:
    if name == "strassen":
        return strassen_reference()
    if _NAMED.match(name):
        return design_decomposition(named_design(name))
    if os.path.exists(name):
        obj = _read_json(name)
        if "terms" in obj:
            return decomposition_from_json(obj)
        return design_decomposition(design_from_json(obj))
    raise UsageError(f"unknown decomposition {name!r}")


# ---------------------------------------------------------------------------
# commands


def _orbit_from_args(args) -> Design:
    if args.generators:
        spec = _read_json(args.generators)
        kind = spec.get("scalar", "rational")
        mats = [as_matrix([[sc.decode_scalar(x, kind) for x in row] for row in g], exact=kind != sc.FLOAT) for g in spec["matrices"]]
        seed = as_vector([sc.decode_scalar(x, kind) for x in spec["seed"]], exact=kind != sc.FLOAT)
        G = GeneratorSet(len(seed), tuple(mats))
        return orbit_design(G, seed, args.max_orbit, spec.get("embedding"), label="orbit")
    if args.group == "symmetric":
        if args.n is None or args.n < 1:
            raise UsageError("orbit --group symmetric needs --n >= 1")
        seed = simplex_design(args.n).vectors[0]
        return orbit_design(symmetric_group_generators(args.n + 1), seed, args.max_orbit, SUMZERO, f"orbit-S{args.n + 1}")
    if args.group == "cyclic":
        if args.m is None or args.m < 1:
            raise UsageError("orbit --group cyclic needs --m >= 1")
        return orbit_design(rotation_generators(args.m), as_vector([1.0, 0.0]), args.max_orbit, None, f"orbit-C{args.m}")
    raise UsageError("orbit needs --group or --generators")


def cmd_design(args) -> int:
    if args.kind == "triangle":
        D = triangle_design()
    elif args.kind == "simplex":
        if args.n is None or args.n < 1:
            raise UsageError("simplex needs --n >= 1")
        D = simplex_design(args.n)
    elif args.kind == "polygon":
        if args.m is None:
            raise UsageError("polygon needs --m")
        D = polygon_design(args.m, exact=args.exact)
    else:
        D = _orbit_from_args(args)
    rep = verify_design(D, args.tol)
    obj = design_to_json(D)
    _write_json(args.output, obj)
    lines = [f"s={D.s} n={D.n} residuals {_residual(rep.sum_residual)} {_residual(rep.frame_residual)}", f"design {'pass' if rep.passed else 'FAIL'}"]
    report = {
        "command": "design",
        "label": D.label,
        "n": D.n,
        "s": D.s,
        "scalar": D.kind,
        "passed": rep.passed,
        "sum_residual": rep.sum_residual,
        "frame_residual": rep.frame_residual,
    }
    _emit(lines, report)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_decomp(args) -> int:
    if args.builtin:
        if args.builtin != "strassen":
            raise UsageError(f"unknown builtin {args.builtin!r}")
        dec = strassen_reference()
    elif args.design:
        dec = design_decomposition(named_design(args.design))
    else:
        raise UsageError("decomp needs --design or --builtin")
    _write_json(args.output, decomposition_to_json(dec))
    report = {"command": "decomp", "provenance": dec.provenance, "n": dec.n, "terms": len(dec), "scalar": dec.kind}
    line = f"terms={len(dec)}"
    passed = True
    if args.verify:
        rep = verify_decomposition(dec, args.tol)
        passed = rep.passed
        line += f" residual={_residual(rep.residual)} {'pass' if rep.passed else 'FAIL'}"
        report.update(verified=True, passed=rep.passed, residual=rep.residual)
    _emit([line], report)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_multiply(args) -> int:
    if args.size < 1:
        raise UsageError("--size must be >= 1")
    alg = from_decomposition(named_decomposition(args.decomp), args.tol)
    rng = random.Random(args.seed)
    A = random_rational_matrix(rng, args.size)
    B = random_rational_matrix(rng, args.size)
    counter, naive_counter = MultCounter(), MultCounter()
    if args.recursive:
        C = recursive_multiply(alg, A, B, counter)
    else:
        if args.size != alg.n:
            raise UsageError(f"without --recursive the size must equal the base size {alg.n}")
        C = multiply(alg, A, B, counter)
    ref = naive_multiply(A, B, naive_counter)
    match = matrices_equal(C, ref, args.tol)
    line = f"mults={counter.scalar_mults} naive={naive_counter.scalar_mults} match={'yes' if match else 'no'}"
    report = {
        "command": "multiply",
        "provenance": alg.provenance,
        "size": args.size,
        "seed": args.seed,
        "recursive": args.recursive,
        "mults": counter.scalar_mults,
        "naive": naive_counter.scalar_mults,
        "match": match,
    }
    _emit([line], report)
    return EXIT_OK if match else EXIT_FAIL


def cmd_bench(args) -> int:
    alg = from_decomposition(named_decomposition(args.decomp), args.tol)
    try:
        sizes = [int(x) for x in args.sizes.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --sizes {args.sizes!r}") from exc
    if not sizes or min(sizes) < 1:
        raise UsageError("--sizes must be positive integers")
    rng = random.Random(args.seed)
    rows, ok = [], True
    for N in sizes:
        counter = MultCounter()
        elapsed = 0.0
        match = True
        for _ in range(args.reps):
            A, B = random_float_matrix(rng, N), random_float_matrix(rng, N)
            counter = MultCounter()
            t0 = time.perf_counter()
            C = recursive_multiply(alg, A, B, counter, cutoff=args.cutoff)
            elapsed += time.perf_counter() - t0
            match = match and matrices_equal(C, A @ B, 1e-9)
        ok = ok and match
        row = {
            "size": N,
            "mults": counter.scalar_mults,
            "predicted": multiplication_count(alg, N) if args.cutoff is None else None,
            "naive": N**3,
            "ratio": counter.scalar_mults / N**3,
            "match": match,
        }
        if not args.no_timing:
            row["seconds_per_rep"] = elapsed / args.reps
        rows.append(row)
    header = f"{'size':>6} {'mults':>10} {'naive':>10} {'ratio':>8}" + ("" if args.no_timing else f" {'s/rep':>10}")
    lines = [f"base {alg.provenance} n={alg.n} r={alg.r}", header]
    for row in rows:
        line = f"{row['size']:>6} {row['mults']:>10} {row['naive']:>10} {row['ratio']:>8.4f}"
        if not args.no_timing:
            line += f" {row['seconds_per_rep']:>10.4g}"
        lines.append(line)
    _emit(lines, {"command": "bench", "provenance": alg.provenance, "r": alg.r, "n": alg.n, "rows": rows})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    obj = _read_json(args.path)
    if "terms" in obj:
        dec = decomposition_from_json(obj)
        rep = verify_decomposition(dec, args.tol)
        _emit([str(rep)], {"command": "verify", "type": "decomposition", "terms": rep.terms, "passed": rep.passed, "residual": rep.residual})
    else:
        D = design_from_json(obj)
        rep = verify_design(D, args.tol)
        _emit(
            [f"s={D.s} n={D.n} {rep}"],
            {"command": "verify", "type": "design", "passed": rep.passed, "sum_residual": rep.sum_residual, "frame_residual": rep.frame_residual},
        )
    return EXIT_OK if rep.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mmdesign", description="2-design matrix multiplication algorithms.")
    p.add_argument("--tol", type=float, default=None, help="tolerance for float checks (default $MMDESIGN_TOL or 1e-9)")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="build and verify a 2-design")
    d.add_argument("kind", choices=["triangle", "simplex", "polygon", "orbit"])
    d.add_argument("--n", type=int, help="simplex dimension; for orbit --group symmetric, S_(n+1)")
    d.add_argument("--m", type=int, help="polygon size; for orbit --group cyclic, the rotation order")
    d.add_argument("--exact", action="store_true", help="exact polygon (m in 3, 4, 6)")
    d.add_argument("--group", choices=["symmetric", "cyclic"])
    d.add_argument("--generators", help="JSON file with matrices, seed, scalar, optional embedding")
    d.add_argument("--max-orbit", type=int, default=10000)
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_design)

    c = sub.add_parser("decomp", help="build a decomposition of MM_n")
    c.add_argument("--design", help="triangle, simplexN, polygonM[-exact] or a design JSON file")
    c.add_argument("--builtin", help="strassen")
    c.add_argument("--verify", action="store_true")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_decomp)

    m = sub.add_parser("multiply", help="multiply seeded random matrices and compare with the naive product")
    m.add_argument("--decomp", required=True, help="strassen, a design name, or a JSON file")
    m.add_argument("--size", type=int, required=True)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--recursive", action="store_true")
    m.set_defaults(func=cmd_multiply)

    b = sub.add_parser("bench", help="multiplication counts and timings over several sizes")
    b.add_argument("--decomp", required=True)
    b.add_argument("--sizes", default="2,4,8")
    b.add_argument("--reps", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--cutoff", type=int, default=None, help="switch to the naive product at this block size")
    b.add_argument("--no-timing", action="store_true", help="omit wall times so output is reproducible")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="verify a design or decomposition JSON file")
    v.add_argument("path")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol is None:
        args.tol = default_tol()
    try:
        return args.func(args)
    except (DesignVerificationError, UnverifiedDecompositionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, InvalidDesignError, OrbitOverflowError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
