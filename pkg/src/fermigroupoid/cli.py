"""``fermigroupoid`` command line.

Every command prints a JSON report on stdout.  The exit status is 0 when all
checks pass, 1 when a check fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .canonical_order import canonical_order, label_bijection
from .experiment import eigensolve, run_selfbinding_experiment
from .fock import SectorBasis, SectorOperator
from .hamiltonian import assemble_sector
from .io import (
    atomic_write,
    load_config,
    load_hamiltonian_spec,
    load_matrix,
    load_pattern,
    save_basis,
    save_operator,
    save_pattern,
    save_rows,
)
from .pattern import KINDS, generate, pattern_metric_report, validate_delone
from .suites import SUITES, SuiteOptions, run_suite


def _emit(report: dict[str, Any]) -> None:
    json.dump(report, sys.stdout, indent=2, default=_jsonable)
    sys.stdout.write("\n")


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _params(pairs: Sequence[str] | None) -> dict[str, Any]:
    out = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {item!r}")
        out[key.strip()] = _parse_value(value.strip())
    return out


def _options(args: argparse.Namespace, **extra: Any) -> SuiteOptions:
    opt = SuiteOptions(seed=args.seed, tol=args.tol, window=args.window)
    for key in ("sites", "samples", "arity"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(opt, key, value)
    for key, value in extra.items():
        setattr(opt, key, value)
    return opt


def _suite_report(selectors: Sequence[str], opt: SuiteOptions) -> int:
    reports = [run_suite(s, opt) for s in selectors]
    passed = all(r.passed for r in reports)
    _emit({"passed": passed, "version": __version__, "suites": [r.to_dict() for r in reports]})
    return 0 if passed else 1


# pattern ------------------------------------------------------------------------


def cmd_pattern_gen(args: argparse.Namespace) -> int:
    window = args.window if args.window is not None else 10.0
    center = [float(c) for c in args.center.split(",")] if args.center else None
    p = generate(args.kind, _params(args.param), args.seed, window, center)
    save_pattern(p, args.output)
    _emit({"passed": True, "output": args.output, "kind": p.kind, "points": len(p), "r": p.r, "R": p.R})
    return 0


def cmd_pattern_metric(args: argparse.Namespace) -> int:
    p1, p2 = load_pattern(args.a), load_pattern(args.b)
    rep = pattern_metric_report(p1, p2, args.grid)
    _emit({"passed": True, "value": rep.value, "comparison_radius": rep.comparison_radius, "supremum_radius": rep.supremum_radius})
    return 0


def cmd_pattern_validate(args: argparse.Namespace) -> int:
    rep = validate_delone(load_pattern(args.file))
    _emit({"passed": rep.valid, "violations": rep.violations[:50], "violation_count": len(rep.violations)})
    return 0 if rep.valid else 1


# module suites ----------------------------------------------------------------------


def cmd_car_check(args: argparse.Namespace) -> int:
    return _suite_report(["car"], _options(args))


def cmd_fock_check(args: argparse.Namespace) -> int:
    return _suite_report(["fock"], _options(args))


def cmd_galg_check(args: argparse.Namespace) -> int:
    pattern = load_pattern(args.pattern) if args.pattern else None
    return _suite_report(["galg"], _options(args, pattern=pattern))


def cmd_groupoid_verify(args: argparse.Namespace) -> int:
    pattern = load_pattern(args.pattern) if args.pattern else None
    return _suite_report(["groupoid", "2action"], _options(args, pattern=pattern))


def cmd_check(args: argparse.Namespace) -> int:
    return _suite_report([args.selector], _options(args))


# Hamiltonians ------------------------------------------------------------------------


def cmd_ham_assemble(args: argparse.Namespace) -> int:
    pattern = load_pattern(args.pattern)
    coeffs = load_hamiltonian_spec(args.spec)
    op = assemble_sector(coeffs, pattern, args.N)
    save_operator(op, args.output)
    if args.basis:
        save_basis(op.basis, args.basis)
    hermitian = op.is_hermitian(args.tol)
    _emit({"passed": hermitian, "output": args.output, "dimension": op.basis.dim, "nnz": op.nnz, "hermitian": hermitian})
    return 0 if hermitian else 1


def cmd_ham_spectrum(args: argparse.Namespace) -> int:
    mat = load_matrix(args.matrix).toarray()
    spec = eigensolve(mat, cap=args.cap)
    save_rows(args.output, ["index", "eigenvalue"], ((i, float(v)) for i, v in enumerate(spec.values)))
    trace = float(np.real(np.trace(mat)))
    dev = abs(trace - float(spec.values.sum())) / max(abs(trace), float(np.abs(spec.values).sum()), 1.0)
    passed = dev <= 1e-8
    _emit({"passed": passed, "output": args.output, "dimension": len(spec.values), "max_residual": spec.max_residual, "trace_deviation": dev})
    return 0 if passed else 1


# canonical order ----------------------------------------------------------------------


def cmd_canon_order(args: argparse.Namespace) -> int:
    pattern = load_pattern(args.pattern)
    labeling = label_bijection(pattern, args.eps)
    subset = [int(s) for s in args.subset.split(",") if s.strip()]
    axes = [int(s) for s in args.index_order.split(",")] if args.index_order else None
    order = canonical_order(labeling, subset, axes)
    _emit({"passed": True, "order": list(order), "labels": [list(labeling.label(i)) for i in order]})
    return 0


# experiments ------------------------------------------------------------------------------


def cmd_selfbinding(args: argparse.Namespace) -> int:
    config: dict[str, Any] = load_config(args.config) if args.config else {}
    if args.sites is not None:
        config["pattern"] = {"sites": args.sites}
    for key in ("N", "t", "u", "gap_factor", "cap"):
        value = getattr(args, key)
        if value is not None:
            config[key] = value
    rep = run_selfbinding_experiment(config)
    if args.output:
        save_rows(args.output, ["index", "eigenvalue", "island", "mean_pair_distance"], rep.rows())
    summary = rep.summary()
    passed = rep.max_residual <= 1e-8 * max(float(np.abs(rep.eigenvalues).max(initial=0.0)), 1e-300) and rep.trace_deviation <= 1e-8
    summary["passed"] = passed
    if args.summary:
        atomic_write(args.summary, json.dumps(summary, indent=2, default=_jsonable) + "\n")
    _emit(summary)
    return 0 if passed else 1


# parser ------------------------------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def default(v: Any) -> Any:
        return argparse.SUPPRESS if suppress else v

    parser.add_argument("--seed", type=int, default=default(0), help="random seed (default 0)")
    parser.add_argument("--window", type=float, default=default(None), help="sampling window radius")
    parser.add_argument("--tol", type=float, default=default(1e-12), help="tolerance for approximate checks")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    parser = argparse.ArgumentParser(prog="fermigroupoid", description="Fermion groupoids on Delone patterns.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    top = parser.add_subparsers(dest="command", required=True)

    def group(name: str, help_: str) -> argparse._SubParsersAction:
        return top.add_parser(name, help=help_).add_subparsers(dest="action", required=True)

    def leaf(sub: argparse._SubParsersAction, name: str, fn, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_, parents=[common])
        p.set_defaults(func=fn)
        return p

    pat = group("pattern", "generate, compare and validate patterns")
    p = leaf(pat, "gen", cmd_pattern_gen, "sample a pattern")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="generator parameter (repeatable)")
    p.add_argument("--center", help="comma-separated window center")
    p.add_argument("-o", "--output", required=True, help="JSON or .csv output")
    p = leaf(pat, "metric", cmd_pattern_metric, "distance between two patterns")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--grid", type=int, default=256)
    p = leaf(pat, "validate", cmd_pattern_validate, "check the Delone radii")
    p.add_argument("file")

    for name, fn, help_ in (("car", cmd_car_check, "CAR algebra suite"), ("fock", cmd_fock_check, "Fock sector suite")):
        p = leaf(group(name, help_), "check", fn, help_)
        p.add_argument("--sites", type=int, default=8)
        p.add_argument("--samples", type=int, default=200)

    p = leaf(group("galg", "groupoid algebra"), "check", cmd_galg_check, "convolution, involution, expectation, covariance")
    p.add_argument("--pattern")
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--samples", type=int, default=200)

    p = leaf(group("groupoid", "groupoid axioms"), "verify", cmd_groupoid_verify, "axiom and 2-action suites")
    p.add_argument("--pattern")
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--samples", type=int, default=200)

    ham = group("ham", "Hamiltonian sector matrices")
    p = leaf(ham, "assemble", cmd_ham_assemble, "assemble an N-particle sector matrix")
    p.add_argument("--pattern", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--spec", required=True, help="TOML or JSON coefficient blocks")
    p.add_argument("-o", "--output", required=True, help="Matrix Market output")
    p.add_argument("--basis", help="optional CSV of the basis states")
    p = leaf(ham, "spectrum", cmd_ham_spectrum, "dense eigenvalues of a Matrix Market file")
    p.add_argument("matrix")
    p.add_argument("-o", "--output", required=True, help="CSV output")
    p.add_argument("--cap", type=int, default=6000)

    p = leaf(group("canon", "canonical orders"), "order", cmd_canon_order, "canonical order of a subset")
    p.add_argument("--pattern", required=True)
    p.add_argument("--subset", required=True, help='point indices, e.g. "3,7,1"')
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--index-order", help="coordinate priority, e.g. \"1,0\"")

    p = leaf(group("experiment", "numerical experiments"), "selfbinding", cmd_selfbinding, "bound pairs versus scattering")
    p.add_argument("--config", help="TOML or JSON configuration")
    p.add_argument("--sites", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--u", type=float)
    p.add_argument("--gap-factor", dest="gap_factor", type=float)
    p.add_argument("--cap", type=int)
    p.add_argument("-o", "--output", help="spectrum CSV")
    p.add_argument("--summary", help="island summary JSON")

    p = top.add_parser("check", help="run property suites", parents=[common])
    p.set_defaults(func=cmd_check)
    p.add_argument("selector", choices=sorted(SUITES) + ["all"])
    p.add_argument("--sites", type=int, default=8)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--arity", type=int, default=2)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        _emit({"passed": False, "error": f"{type(exc).__name__}: {exc}"})
        return 2


if __name__ == "__main__":
    sys.exit(main())
