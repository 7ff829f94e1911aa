"""Command-line front end.

Exit codes: 0 success, 1 negative result (empty region, no cut, not
nonnegative, failed lab check), 2 input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .certify import CertificateError, NotNonnegativeError, sos_decompose, verify_certificate
from .cuts import compare_cuts, cut_as_inequality, gradient_cut, validate_cut
from .fileio import InputError, dumps, fixture_names, load_instance, load_pointset, read_text, to_csv
from .linprog import NumericalBreakdown
from .polarlab import (
    CHECKS,
    HypothesisError,
    PointSetError,
    compare_generators,
    generator_candidate,
    mutate_candidate,
    polar_empty,
    random_point_set,
)
from .polycore import DimensionError
from .tighten import prune_enclosure, tightest_box
from .unipoly import UniPoly
from .visibility import (
    EXACT_QUADRATIC,
    InstanceError,
    OutsideDomainError,
    in_relaxation,
    is_visible,
    region_description,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class Negative(Exception):
    """A mathematically negative outcome that still carries a result."""

    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload


def _floats(text: str, what: str) -> np.ndarray:
    try:
        vals = [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise InputError(f"{what} must be a comma-separated list of numbers") from None
    if not vals or not np.all(np.isfinite(vals)):
        raise InputError(f"{what} must be a nonempty list of finite numbers")
    return np.array(vals)


def _box_json(box):
    return None if box is None else {"lo": box.lo, "hi": box.hi}


def _require_input(args):
    if not args.input:
        raise InputError("--input is required for this command")


def cmd_check(args) -> dict:
    _require_input(args)
    inst = load_instance(args.input)
    if args.point is None:
        raise InputError("--point is required")
    x = _floats(args.point, "--point")
    if x.size != inst.n:
        raise InputError(f"--point has {x.size} coordinates, instance has n={inst.n}")
    if args.tol is not None:
        inst.__dict__["surface_tol"] = float(args.tol)
    p = inst.segment(x)
    return {
        "point": x,
        "g_value": inst.g(x),
        "on_surface": bool(abs(inst.g(x)) <= inst.surface_tol),
        "surface_tol": inst.surface_tol,
        "visible": is_visible(inst, x),
        "relaxed": in_relaxation(inst, x),
        "p_lambda_coeffs": p.coeffs,
    }


def _region_json(region) -> dict:
    out = {"kind": region.kind, "surface": {"monomials": region.surface.to_json()}}
    if region.kind == EXACT_QUADRATIC:
        out["halfspace"] = {"alpha": region.alpha, "beta": region.beta, "form": "alpha.x + beta >= 0"}
    else:
        out["guard"] = {"monomials": region.h.to_json(), "form": "h(x) >= 0"}
    out["domain"] = {
        "box": _box_json(region.domain.box),
        "linear": [{"a": c.a, "sense": c.sense, "rhs": c.rhs} for c in region.domain.linear],
    }
    return out


def cmd_region(args) -> dict:
    _require_input(args)
    return _region_json(region_description(load_instance(args.input)))


def _enclose(region, args, method: str):
    if method == "exact":
        if region.kind != EXACT_QUADRATIC:
            raise InputError("--method exact needs a quadratic instance")
        return tightest_box(region)
    if method == "auto":
        return tightest_box(region, args.depth, args.min_width)
    return prune_enclosure(region, args.depth, args.min_width)


def cmd_tighten(args) -> dict:
    _require_input(args)
    region = region_description(load_instance(args.input))
    enc = _enclose(region, args, args.method)
    out = {
        "method": args.method,
        "status": enc.status,
        "box": _box_json(enc.box),
        "leaves_kept": enc.leaves_kept,
        "depth_used": enc.depth_used,
        "region_kind": region.kind,
    }
    if enc.empty:
        raise Negative("visible region proved empty", out)
    return out


def _cut_json(cut) -> dict:
    a, r = cut_as_inequality(cut)
    return {**cut.to_json(), "inequality": {"coeffs": a, "rhs": r, "form": "coeffs.x >= rhs"}}


def cmd_cut(args) -> dict:
    _require_input(args)
    inst = load_instance(args.input)
    base = gradient_cut(inst.g, inst.C.box, inst.xbar)
    out: dict = {"tightened": bool(args.tighten)}
    if args.tighten:
        region = region_description(inst)
        enc = _enclose(region, args, args.method)
        if enc.empty:
            raise Negative("visible region proved empty; S has no points to cut", {**out, "status": enc.status})
        D = enc.box
        cut = gradient_cut(inst.g, D, inst.xbar)
        out["domain_box"] = _box_json(D)
        out["method"] = args.method
    else:
        D = inst.C.box
        cut = base
        out["domain_box"] = _box_json(D)
    if cut is None:
        raise Negative("no separating underestimator", {**out, "cut": None})
    out["cut"] = _cut_json(cut)
    if args.tighten:
        out["untightened_cut"] = None if base is None else _cut_json(base)
        out["dominance"] = (
            "only_tightened_separates" if base is None
            else compare_cuts(cut, base, inst.C.box, samples=1000, seed=args.seed)
        )
    if args.validate:
        rep = validate_cut(cut, inst, args.validate, args.seed)
        out["validation"] = {
            "status": rep.status,
            "max_violation": rep.max_violation,
            "feasible_samples": rep.feasible_samples,
        }
    return out


def cmd_certify(args) -> dict:
    degree = args.degree
    if args.coeffs is not None:
        coeffs = _floats(args.coeffs, "--coeffs")
    elif args.input:
        import json

        text, label = read_text(args.input)
        try:
            data = json.loads(text)
            coeffs = np.array(data["coeffs"], dtype=float)
            degree = data.get("degree", degree)
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{label}: expected an object with 'coeffs' ({exc})") from None
    else:
        raise InputError("give --coeffs or --input")
    p = UniPoly(coeffs)
    if p.is_zero:
        raise InputError("the zero polynomial has no certificate of this form")
    try:
        cert = sos_decompose(p, degree)
    except NotNonnegativeError:
        raise Negative("not nonnegative", {"coeffs": p.coeffs, "nonnegative": False}) from None
    return {
        "coeffs": p.coeffs,
        "nonnegative": True,
        "certificate": cert.to_json(),
        "residual": verify_certificate(p, cert),
    }


def cmd_lab(args) -> dict:
    check = args.check
    results = []
    if args.input:
        ps, cand = load_pointset(args.input)
        if cand is None:
            if check in ("smallest-inter", "smallest-closed") and polar_empty(ps):
                raise HypothesisError("xbar lies in the convex hull of the points")
            cand = generator_candidate(check, ps, np.random.default_rng(args.seed))
        if args.mutate:
            cand = mutate_candidate(ps, cand)
        out = compare_generators(ps, cand)
        results.append({"trial": 0, "source": args.input, **out.to_json(),
                        "candidate": cand.points})
    else:
        for t in range(args.trials):
            rng = np.random.default_rng([args.seed, t])
            while True:
                n = int(rng.integers(2, 5))
                ps = random_point_set(rng, n, int(rng.integers(5, 31)))
                if check not in ("smallest-inter", "smallest-closed") or not polar_empty(ps):
                    break
            cand = generator_candidate(check, ps, rng)
            if args.mutate:
                cand = mutate_candidate(ps, cand)
            out = compare_generators(ps, cand)
            entry = {"trial": t, "n": n, **out.to_json()}
            if not out.passed:
                entry["points"] = ps.points
                entry["candidate"] = cand.points
            results.append(entry)
    passed = sum(r["passed"] for r in results)
    report = {
        "check": check,
        "trials": len(results),
        "passed": passed,
        "failed": len(results) - passed,
        "mutated": bool(args.mutate),
        "results": results,
    }
    if passed != len(results):
        raise Negative(f"{len(results) - passed} of {len(results)} lab trials failed", report)
    return report


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="instance/point-set JSON file, or fixture:NAME")
    common.add_argument("--output", default="-", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--depth", type=int, default=18, help="branch-and-prune depth")
    common.add_argument("--min-width", type=float, default=None, dest="min_width")
    common.add_argument("--tol", type=float, default=None, help="surface tolerance override")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=200)
    common.add_argument("--quiet", action="store_true", help="suppress messages on stderr")

    parser = argparse.ArgumentParser(
        prog="visicut",
        description="Visible-point tightening of cutting planes for polynomial constraints.",
        epilog=f"packaged fixtures: {', '.join(fixture_names())}",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="visibility of one surface point")
    p.add_argument("--point", help="comma-separated coordinates")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("region", parents=[common], help="implicit description of the visible region")
    p.set_defaults(func=cmd_region)

    methods = ("prune", "exact", "auto")
    p = sub.add_parser("tighten", parents=[common], help="box enclosure of the visible region")
    p.add_argument("--method", choices=methods, default="prune")
    p.set_defaults(func=cmd_tighten)

    p = sub.add_parser("cut", parents=[common], help="McCormick gradient cut, optionally over the tightened box")
    p.add_argument("--tighten", action="store_true")
    p.add_argument("--method", choices=methods, default="auto",
                   help="enclosure used with --tighten (auto: exact box for quadratics)")
    p.add_argument("--validate", type=int, default=0, metavar="SAMPLES",
                   help="sample S this many times and report the worst violation")
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("certify", parents=[common], help="nonnegativity certificate on [0, 1]")
    p.add_argument("--coeffs", help="ascending coefficients, comma-separated")
    p.add_argument("--degree", type=int, default=None, help="formal degree (sets the parity)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("lab", parents=[common], help="reverse-polar generator checks on finite sets")
    p.add_argument("--check", choices=CHECKS, default="visible")
    p.add_argument("--mutate", action="store_true", help="corrupt the candidate (negative control)")
    p.set_defaults(func=cmd_lab)
    return parser


def _emit(payload, args):
    text = to_csv(payload) if args.format == "csv" else dumps(payload)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    def say(msg):
        if not args.quiet:
            print(f"visicut: {msg}", file=sys.stderr)

    try:
        _emit(args.func(args), args)
        return EXIT_OK
    except Negative as neg:
        if neg.payload is not None:
            _emit(neg.payload, args)
        say(str(neg))
        return EXIT_NEGATIVE
    except (InputError, InstanceError, OutsideDomainError, PointSetError, HypothesisError,
            DimensionError) as exc:
        say(f"input error: {exc}")
        return EXIT_INPUT
    except (NumericalBreakdown, CertificateError, ArithmeticError) as exc:
        say(f"numerical failure: {exc}")
        return EXIT_NUMERIC
    except ValueError as exc:
        say(f"input error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
