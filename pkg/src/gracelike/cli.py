"""Command-line front end.

Every subcommand prints one JSON document on stdout. Exit codes: 0 when the
requested check passed (or a construction succeeded), 1 when a check failed
with a valid report, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from contextlib import redirect_stderr
from dataclasses import dataclass

import numpy as np

from . import mapoly
from .asano_leeyang import PairCoefficients, asano_demo, lee_yang_polynomial, verify_unit_circle
from .constructions import (
    determinant_gnomial,
    flow_to_sigma,
    grace_sigma,
    random_unitary,
    unitary_to_json,
)
from .exceptions import ConvergenceError, GraphParseError, StructuralError
from .gnomial_verify import (
    bitorus_certify,
    classify_n2,
    g0_test_randomized,
    g_test_randomized,
    reduce_to_canonical,
)
from .graph_polys import RegionSpec, auto_regions, dimer_polynomial, load_graph, unbranched_polynomial, verify_region
from .reduced_form import LINEAR_MAX_N, assemble, reduced_form_iterative, reduced_form_linear

REGION_FLAGS = {
    "re": "half_plane_re_nonpositive",
    "im": "half_plane_im_negative",
    "negreal": "negative_real_axis",
    "circle": "unit_circle",
}


class InputError(Exception):
    """Bad input file or argument; maps to exit code 2."""


@dataclass
class CommandResult:
    exit_code: int
    stdout: str
    stderr: str = ""


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _jsonable(x.real), "im": _jsonable(x.imag)}
    return x


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def _load_poly(path: str) -> mapoly.MAPolynomial:
    try:
        return mapoly.from_json(_read_json(path))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands; each returns (payload, exit_code)


def cmd_verify(args):
    P = _load_poly(args.poly)
    if P.is_zero():
        raise InputError("the polynomial is identically zero")
    if args.trials < 1:
        raise InputError("--trials must be positive")
    if args.mode == "g":
        report = g_test_randomized(P, args.trials, args.seed)
    elif args.mode == "g0":
        report = g0_test_randomized(P, args.trials, args.seed)
    else:
        try:
            report = bitorus_certify(P, args.trials, args.seed)
        except StructuralError as exc:
            raise InputError(f"bi-torus test needs a translation-invariant, degree-n polynomial: {exc}") from None
    return report.to_json(), 0 if report.passed else 1


def cmd_reduce(args):
    P = _load_poly(args.poly)
    try:
        report = reduced_form_iterative(P, tol=args.tol)
    except StructuralError as exc:
        raise InputError(str(exc)) from None
    except ConvergenceError as exc:
        return {"error": str(exc), "residual": exc.residual}, 1
    out = report.to_json()
    out["max_coeff_error"] = mapoly.max_coeff_diff(assemble(report.coeffs), P)
    if P.n <= LINEAR_MAX_N:
        lin = reduced_form_linear(P)
        out["linear_check"] = {
            "residual": lin.residual,
            "max_coeff_diff": mapoly.max_coeff_diff(assemble(lin.coeffs), assemble(report.coeffs)),
        }
    ok = report.residual <= max(args.tol, 1e-12) * 10
    return out, 0 if ok else 1


def cmd_classify2(args):
    P = _load_poly(args.poly)
    out = {}
    try:
        canon = reduce_to_canonical(P)
        out["alpha"] = canon.alpha
        out["relabel"] = canon.relabel
        Q = canon.R
    except StructuralError as exc:
        out["canonical_error"] = str(exc)
        Q = P
    if (Q.m, Q.n) != (2, 2):
        raise InputError(f"needs two effective z's and two w's, got m={Q.m}, n={Q.n}")
    rep = classify_n2(Q)
    out.update(rep.to_json())
    return out, 0 if rep.is_valid else 1


def cmd_construct(args):
    if args.what == "sigma":
        P = _guard(grace_sigma, args.n)
        return {"polynomial": mapoly.to_json(P)}, 0
    if args.what == "det":
        U = random_unitary(args.n, args.seed)
        P = _guard(determinant_gnomial, U)
        return {"unitary": unitary_to_json(U), "polynomial": mapoly.to_json(P)}, 0
    # flow from a random determinant G-nomial (or the plain product)
    if args.start == "product":
        P0 = _guard(determinant_gnomial, np.eye(args.n))
    else:
        P0 = _guard(determinant_gnomial, random_unitary(args.n, args.seed))
    try:
        traj = flow_to_sigma(P0, h=args.h, tol=args.tol, max_steps=args.max_steps)
    except ConvergenceError as exc:
        return {"error": str(exc), "residual": exc.residual}, 1
    return {
        "start": mapoly.to_json(P0),
        "trajectory": traj.to_json(),
        "final": mapoly.to_json(traj.final),
    }, 0


def _guard(fn, arg):
    try:
        return fn(arg)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_leeyang(args):
    try:
        a = PairCoefficients.from_json(_read_json(args.coeffs))
        p = lee_yang_polynomial(a)
    except ValueError as exc:
        raise InputError(f"{args.coeffs}: {exc}") from None
    report = verify_unit_circle(p, args.tol)
    out = {"n": a.n, "hypothesis": a.satisfies_hypothesis(), "polynomial": list(p)}
    out.update(report.to_json())
    return out, 0 if report.passed else 1


def cmd_graph(args):
    try:
        G = load_graph(_read(args.file))
    except GraphParseError as exc:
        raise InputError(f"{args.file}: {exc}") from None
    poly = dimer_polynomial(G) if args.kind == "dimer" else unbranched_polynomial(G)
    if args.tol <= 0:
        raise InputError("--tol must be positive")
    if args.region == "auto":
        regions = auto_regions(args.kind, args.tol)
    else:
        regions = [RegionSpec(REGION_FLAGS[args.region], args.tol)]
    out = {"kind": args.kind, "vertices": G.vertex_count, "edges": len(G.edges), "polynomial": poly}
    if len(poly) < 2:
        out.update({"roots": [], "max_deviation": 0.0, "pass": True, "region": regions[0].kind})
        return out, 0
    reports = [verify_region(poly, r).to_json() for r in regions]
    main = reports[0]
    out.update({k: main[k] for k in ("region", "roots", "max_deviation", "pass")})
    if len(reports) > 1:
        # the first region decides the exit code; the rest are reported as data
        out["also"] = [{k: r[k] for k in ("region", "max_deviation", "pass")} for r in reports[1:]]
    return out, 0 if main["pass"] else 1


def cmd_asano(args):
    out = asano_demo(args.a)
    return out, 0 if out["root_in_region"] else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gracelike", description="Grace-like polynomials: constructions and checks")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gnomial", help="tests and decompositions of a polynomial given as JSON")
    gsub = g.add_subparsers(dest="action", required=True)
    v = gsub.add_parser("verify", help="randomized falsification of the separation conditions")
    v.add_argument("--poly", required=True)
    v.add_argument("--trials", type=int, default=10_000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--mode", choices=["g", "g0", "bitorus"], default="g")
    v.set_defaults(func=cmd_verify)
    r = gsub.add_parser("reduce", help="reduced form by the exchange algorithm")
    r.add_argument("--poly", required=True)
    r.add_argument("--tol", type=float, default=1e-12)
    r.set_defaults(func=cmd_reduce)
    c = gsub.add_parser("classify2", help="fit to the n = 2 theta family")
    c.add_argument("--poly", required=True)
    c.set_defaults(func=cmd_classify2)

    k = sub.add_parser("construct", help="build a reduced G-nomial")
    ksub = k.add_subparsers(dest="what", required=True)
    s = ksub.add_parser("sigma")
    s.add_argument("--n", type=int, required=True)
    d = ksub.add_parser("det")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--seed", type=int, default=0)
    f = ksub.add_parser("flow")
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--tol", type=float, default=1e-10)
    f.add_argument("--h", type=float, default=1.0)
    f.add_argument("--max-steps", type=int, default=5000)
    f.add_argument("--start", choices=["det", "product"], default="det")
    k.set_defaults(func=cmd_construct)

    ly = sub.add_parser("leeyang", help="unit-circle check of a Lee-Yang polynomial")
    ly.add_argument("--coeffs", required=True)
    ly.add_argument("--tol", type=float, default=1e-6)
    ly.set_defaults(func=cmd_leeyang)

    gr = sub.add_parser("graph", help="dimer or unbranched subgraph polynomial and its roots")
    gr.add_argument("--file", required=True)
    gr.add_argument("--kind", choices=["dimer", "unbranched"], required=True)
    gr.add_argument("--region", choices=["auto", *REGION_FLAGS], default="auto")
    gr.add_argument("--tol", type=float, default=1e-7)
    gr.set_defaults(func=cmd_graph)

    a = sub.add_parser("asano", help="Asano contraction walk-through")
    asub = a.add_subparsers(dest="action", required=True)
    demo = asub.add_parser("demo")
    demo.add_argument("--a", type=float, required=True)
    demo.set_defaults(func=cmd_asano)

    return p


def run(argv) -> CommandResult:
    parser = build_parser()
    err = io.StringIO()
    try:
        with redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return CommandResult(int(exc.code or 0), "", err.getvalue())
    try:
        payload, code = args.func(args)
    except InputError as exc:
        return CommandResult(2, "", f"gracelike: error: {exc}\n")
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"
    return CommandResult(code, text, err.getvalue())


def main(argv=None) -> int:
    result = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(result.stdout)
    sys.stderr.write(result.stderr)
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
