"""Command-line interface: classify, normalize, and verify systems.

Exit codes: 0 success, 1 input/parse error, 2 precondition failure
(not a Cartan family, commutation violated, singular nondegeneracy
matrix), 3 verification failure.  All reports are deterministic JSON and
embed the library version, bracket convention, and truncation cuts.
"""
from __future__ import annotations

import argparse
import json
import sys as _sys

from . import __version__
from .brackets import POISSON_CONVENTION
from .homological import IncompatibleSystem, NotStandardBasis
from .nf_classical import (ClassicalNF, CommutationViolated, IntegrableSystem,
                           NotInKernel, classical_normal_form,
                           verify_classical_nf)
from .nf_semiclassical import (SemiclassicalNF, SingularM0,
                               semiclassical_normal_form,
                               verify_semiclassical_nf)
from .poly import DimensionMismatch, ModeMismatch, PolySymbol
from .symplectic import (NotCartan, QuadraticForm, hessian_at, verify_cartan,
                         williamson_classify)
from .systems import NeumannSpec, neumann_local_system

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_PRECONDITION = 2
EXIT_VERIFY = 3

PRECONDITION_ERRORS = (NotCartan, CommutationViolated, SingularM0,
                       IncompatibleSystem, NotStandardBasis, NotInKernel)
PARSE_ERRORS = (json.JSONDecodeError, KeyError, TypeError, IndexError,
                ValueError)


def _emit(report, out_path):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        _sys.stdout.write(text)


def _header(args):
    return {
        "version": __version__,
        "convention": POISSON_CONVENTION,
        "deg_cut": args.deg,
        "h_cut": getattr(args, "h_order", 0),
        "mode": getattr(args, "mode", "rational"),
        "seed": getattr(args, "seed", 0),
    }


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _load_system(obj, args) -> IntegrableSystem:
    symbols = [PolySymbol.from_json(t) for t in obj["symbols"]]
    deg = args.deg
    h_order = getattr(args, "h_order", 0)
    symbols = [p.with_cuts(deg_cut=deg, h_cut=max(h_order, p.h_cut))
               if (p.deg_cut != deg) else p.with_cuts(h_cut=max(h_order,
                                                                p.h_cut))
               for p in symbols]
    if getattr(args, "mode", "rational") == "float":
        symbols = [p.to_float() for p in symbols]
    return IntegrableSystem(symbols)


def _load_forms(obj, args):
    """Quadratic forms from {"hessians": ...} or a symbol file + base point."""
    from .coeffs import coeff_from_json
    mode = getattr(args, "mode", "rational")
    if "hessians" in obj:
        return [QuadraticForm([[coeff_from_json(e, mode) for e in row]
                               for row in H]) for H in obj["hessians"]]
    symbols = [PolySymbol.from_json(t) for t in obj["symbols"]]
    if mode == "float":
        symbols = [p.to_float() for p in symbols]
    point = obj.get("point")
    if point is None:
        point = [0] * (2 * symbols[0].n)
    else:
        point = [coeff_from_json(e, mode) for e in point]
    return [hessian_at(p, point) for p in symbols]


def cmd_classify(args):
    try:
        obj = _load_json(args.input)
        forms = _load_forms(obj, args)
    except PARSE_ERRORS as exc:
        _emit({"error": f"parse: {exc}"}, args.out)
        return EXIT_PARSE
    report = _header(args)
    try:
        cartan_report = verify_cartan(forms, seed=args.seed)
        report["cartan_checks"] = cartan_report.to_json()
        basis = williamson_classify(forms, seed=args.seed)
    except NotCartan as exc:
        report["error"] = f"precondition: {exc}"
        _emit(report, args.out)
        return EXIT_PRECONDITION
    report["classification"] = basis.to_json()
    _emit(report, args.out)
    return EXIT_OK


def cmd_classical(args):
    try:
        obj = _load_json(args.input)
        system = _load_system(obj, args)
    except PARSE_ERRORS as exc:
        _emit({"error": f"parse: {exc}"}, args.out)
        return EXIT_PARSE
    report = _header(args)
    try:
        nf = classical_normal_form(system, args.deg, seed=args.seed)
    except PRECONDITION_ERRORS as exc:
        report["error"] = f"precondition: {exc}"
        _emit(report, args.out)
        return EXIT_PRECONDITION
    cert = verify_classical_nf(nf, system)
    report["normal_form"] = nf.to_json()
    report["certificate"] = cert.to_json()
    _emit(report, args.out)
    return EXIT_OK if cert.ok else EXIT_VERIFY


def cmd_semiclassical(args):
    try:
        obj = _load_json(args.input)
        system = _load_system(obj, args)
    except PARSE_ERRORS as exc:
        _emit({"error": f"parse: {exc}"}, args.out)
        return EXIT_PARSE
    report = _header(args)
    try:
        nf = semiclassical_normal_form(system, args.deg, args.h_order,
                                       seed=args.seed)
    except PRECONDITION_ERRORS as exc:
        report["error"] = f"precondition: {exc}"
        _emit(report, args.out)
        return EXIT_PRECONDITION
    cert = verify_semiclassical_nf(nf, system)
    report["normal_form"] = nf.to_json()
    report["certificate"] = cert.to_json()
    _emit(report, args.out)
    return EXIT_OK if cert.ok else EXIT_VERIFY


def cmd_verify(args):
    try:
        obj = _load_json(args.input)
        rep = _load_json(args.report)
        nf_json = rep.get("normal_form", rep)
        semiclassical = "Mh" in nf_json
        if semiclassical:
            nf = SemiclassicalNF.from_json(nf_json)
        else:
            nf = ClassicalNF.from_json(nf_json)
        args.deg = nf.N
        if semiclassical:
            args.h_order = nf.N_h
            exact = nf.base.cartan.exact
        else:
            exact = nf.cartan.exact
        args.mode = "rational" if exact else "float"
        # keep the symbols at their stored cuts: the verifier re-cuts itself
        symbols = [PolySymbol.from_json(t) for t in obj["symbols"]]
        if args.mode == "float":
            symbols = [p.to_float() for p in symbols]
        system = IntegrableSystem(symbols)
    except PARSE_ERRORS as exc:
        _emit({"error": f"parse: {exc}"}, args.out)
        return EXIT_PARSE
    if semiclassical:
        cert = verify_semiclassical_nf(nf, system)
    else:
        cert = verify_classical_nf(nf, system)
    report = _header(args)
    report["certificate"] = cert.to_json()
    _emit(report, args.out)
    return EXIT_OK if cert.ok else EXIT_VERIFY


def cmd_neumann(args):
    try:
        if args.input:
            obj = _load_json(args.input)
            eigenvalues = obj["eigenvalues"]
            fixed_point = int(obj["fixed_point"])
            deg = int(obj.get("deg_cut", args.deg))
        else:
            eigenvalues = [float(v) for v in args.eigenvalues.split(",")]
            if all(v == int(v) for v in eigenvalues):
                eigenvalues = [int(v) for v in eigenvalues]
            fixed_point = args.fixed_point
            deg = args.deg
        spec = NeumannSpec(eigenvalues, fixed_point)
    except PARSE_ERRORS as exc:
        _emit({"error": f"parse: {exc}"}, args.out)
        return EXIT_PARSE
    report = _header(args)
    try:
        H, basis, info = neumann_local_system(spec, deg)
    except NotCartan as exc:
        report["error"] = f"precondition: {exc}"
        _emit(report, args.out)
        return EXIT_PRECONDITION
    report["hamiltonian"] = H.to_json()
    report["classification"] = basis.to_json()
    report["neumann"] = info
    _emit(report, args.out)
    return EXIT_OK if info["matches"] else EXIT_VERIFY


def build_parser():
    p = argparse.ArgumentParser(
        prog="morsenf",
        description="Normal forms and semiclassical invariants at "
                    "nondegenerate critical points of integrable systems.",
        epilog="Exit codes: 0 success, 1 parse error, 2 precondition "
               "failure, 3 verification failure.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_h=True):
        sp.add_argument("--deg", type=int, default=6,
                        help="phase-space degree cut (>= 2)")
        if with_h:
            sp.add_argument("--h-order", type=int, default=0,
                            help="hbar order cut (>= 0)")
        sp.add_argument("--mode", choices=["rational", "float"],
                        default="rational", help="coefficient arithmetic")
        sp.add_argument("--seed", type=int, default=0,
                        help="seed for the generic-combination search")
        sp.add_argument("--out", default=None, help="report output path")

    sp = sub.add_parser("classify", help="Williamson classification of the "
                        "quadratic parts")
    sp.add_argument("input", help="JSON file with symbols or hessians")
    common(sp, with_h=False)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("classical", help="classical normal form up to --deg")
    sp.add_argument("input")
    common(sp, with_h=False)
    sp.set_defaults(func=cmd_classical)

    sp = sub.add_parser("semiclassical", help="semiclassical normal form and "
                        "invariants alpha(hbar)")
    sp.add_argument("input")
    common(sp)
    sp.set_defaults(func=cmd_semiclassical)

    sp = sub.add_parser("verify", help="independently replay a normal-form "
                        "report")
    sp.add_argument("input", help="original system JSON")
    sp.add_argument("report", help="normal-form report JSON")
    sp.add_argument("--out", default=None)
    sp.add_argument("--deg", type=int, default=6, help=argparse.SUPPRESS)
    sp.add_argument("--seed", type=int, default=0, help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("neumann", help="fixed-point classification for the "
                        "Neumann problem")
    sp.add_argument("input", nargs="?", default=None,
                    help="JSON spec {eigenvalues, fixed_point}")
    sp.add_argument("--eigenvalues", default=None,
                    help="comma-separated eigenvalues (alternative to file)")
    sp.add_argument("--fixed-point", type=int, default=0)
    common(sp, with_h=False)
    sp.set_defaults(func=cmd_neumann)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "deg", 2) < 2:
        _sys.stderr.write("error: --deg must be >= 2\n")
        return EXIT_PARSE
    if getattr(args, "h_order", 0) < 0:
        _sys.stderr.write("error: --h-order must be >= 0\n")
        return EXIT_PARSE
    if args.command == "neumann" and not args.input and not args.eigenvalues:
        _sys.stderr.write("error: neumann needs a file or --eigenvalues\n")
        return EXIT_PARSE
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        _sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE


if __name__ == "__main__":
    _sys.exit(main())
