"""Command-line driver. Reports go to stdout as JSON, a short summary to stderr."""

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

from flint import acb

from . import analytic, auxfun, constants as consts
from .balls import ball_json, decimal
from .errors import GelfondError, PrecisionExhausted, WidthNotReached
from .numfield import (
    denominator_clearing_integer,
    field_from_json,
    house,
    house_via_minpoly,
    is_integral,
    minpoly,
    norm,
)
from .siegel import siegel_int, siegel_OK

MAX_PRECISION = 1024
DEMO_SAMPLE_POINTS = [acb("0.5", "0.25"), acb("-1.25", "0.75"), acb("2", "-1")]


class StageFailure(Exception):
    def __init__(self, stage, message):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# loading


def _load_json_arg(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc}") from exc


def load_instance_obj(path):
    """Instance JSON from a path, a bundled data file name, or a pipeline report (its echo)."""
    p = Path(path)
    if p.exists():
        text = p.read_text()
    else:
        try:
            text = resources.files("gelfond").joinpath("data", p.name).read_text()
        except (FileNotFoundError, OSError) as exc:
            raise UsageError(f"instance file {path} not found") from exc
    obj = _load_json_arg(text, "instance file")
    if "echo" in obj:
        obj = obj["echo"]["instance"]
    return obj


def _instance(args, precision):
    obj = dict(load_instance_obj(args.instance))
    if args.q is not None:
        obj["q"] = args.q
    if args.mode is not None:
        obj["mode"] = args.mode
    inst = auxfun.instance_from_json(obj, precision)
    return inst, obj


def _field(args):
    if args.field is None:
        raise UsageError("--field is required")
    obj = args.field if args.field.strip().upper() == "Q" else _load_json_arg(args.field, "--field")
    return field_from_json(obj, args.precision)


def _element(args, field):
    if args.elem is None:
        raise UsageError("--elem is required")
    return field.parse(args.elem)


def _with_precision(fn, precision):
    """Run fn(bits), doubling bits on PrecisionExhausted up to MAX_PRECISION."""
    bits = precision
    while True:
        try:
            return fn(bits), bits
        except PrecisionExhausted:
            if bits >= MAX_PRECISION:
                raise
            bits *= 2


# ---------------------------------------------------------------------------
# subcommands


def cmd_house(args):
    field = _field(args)
    alpha = _element(args, field)

    def run(bits):
        fld = field.refine(bits) if bits != field.precision else field
        a = fld.element(alpha.coords)
        return house(a, args.target_width), house_via_minpoly(a, args.target_width)

    (hv, hm), bits = _with_precision(run, field.precision)
    return {
        "element": alpha.literal(),
        "house": ball_json(hv.value),
        "house_via_minpoly": ball_json(hm.value),
        "lower": decimal(hv.lower),
        "upper": decimal(hv.upper),
        "overlap": bool(hv.value.overlaps(hm.value)),
        "precision": bits,
    }, f"house({alpha.literal()}) = {hv.value}"


def cmd_minpoly(args):
    field = _field(args)
    alpha = _element(args, field)
    p = minpoly(alpha)
    return {
        "element": alpha.literal(),
        "minpoly": repr(p),
        "coefficients": [str(c) for c in p.coeffs],
        "degree": p.degree,
        "is_integral": is_integral(alpha),
        "clearing_integer": denominator_clearing_integer(alpha),
    }, f"minpoly({alpha.literal()}) = {p!r}"


def cmd_norm(args):
    field = _field(args)
    alpha = _element(args, field)
    n = norm(alpha)
    return {"element": alpha.literal(), "norm": str(n)}, f"N({alpha.literal()}) = {n}"


def cmd_siegel(args):
    if args.matrix is None:
        raise UsageError("--matrix is required")
    obj = _load_json_arg(args.matrix, "--matrix")
    fobj = obj.get("field", "Q")
    rows = obj["rows"]
    if isinstance(fobj, str) and fobj.strip().upper() == "Q":
        A = [[int(v) for v in row] for row in rows]
        sol = siegel_int(A, precision=args.precision)
        vector = [str(v) for v in sol.vector]
    else:
        field = field_from_json(fobj, args.precision)
        B = [[field.parse(v) for v in row] for row in rows]
        sol = siegel_OK(B, precision=args.precision)
        vector = [e.literal() for e in sol.vector]
    report = {
        "vector": vector,
        "claimed_bound": ball_json(sol.claimed_bound),
        "achieved": ball_json(sol.achieved),
        **sol.summary(),
    }
    if not sol.bound_satisfied:
        raise StageFailure("siegel", "bound certificate failed")
    return report, f"solution {vector}, bound {sol.claimed_bound}"


def _constants_and_threshold(inst, params, precision):
    table, bits = _with_precision(lambda b: consts.compute_constants(inst, params, b), precision)
    thr = consts.contradiction_threshold(table, inst.field.degree, params.m, params.n)
    return table, thr, bits


def cmd_constants(args):
    inst, _ = _instance(args, args.precision)
    params = auxfun.params_for(inst)
    table, bits = _with_precision(lambda b: consts.compute_constants(inst, params, b), args.precision)
    out = {"constants": table.to_json(), "checks": table.checks, "precision": bits}
    return out, f"log10 c15 <= {table.log10_upper('c15'):.3f}"


def cmd_threshold(args):
    inst, _ = _instance(args, args.precision)
    params = auxfun.params_for(inst)
    table, thr, bits = _constants_and_threshold(inst, params, args.precision)
    out = {
        "threshold": thr,
        "c15_log10_upper": table.log10_upper("c15"),
        "step8_exponent_at_n": consts.step8_exponents(inst.field.degree, params.n),
        "precision": bits,
    }
    return out, f"r* ~ 10^{thr['r_star_log10']:.2f}, n(q_required) >= r*: {thr['n_of_q_required_ge_r_star']}"


def _algebraic_stages(inst, params, timings):
    """Steps 2-6: matrix, eta, injectivity, order, norm. Raises StageFailure on hard assertions."""
    t0 = time.perf_counter()
    coeffs = auxfun.Coefficients(inst, params)
    try:
        matrix, matrix_report = auxfun.build_cleared_matrix(inst, params, coeffs)
    except GelfondError as exc:
        raise StageFailure("matrix", str(exc)) from exc
    timings["matrix"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    try:
        sol = auxfun.solve_coefficients(inst, params, matrix, coeffs)
    except (AssertionError, GelfondError) as exc:
        raise StageFailure("eta", str(exc)) from exc
    timings["eta"] = time.perf_counter() - t0
    if not sol.siegel_certificate["bound_satisfied"]:
        raise StageFailure("siegel", "bound certificate failed")

    injective = auxfun.check_injectivity(inst, params)
    if inst.mode == auxfun.GELFOND and not injective:
        raise StageFailure("injectivity", "a + b beta values collide in gelfond mode")

    t0 = time.perf_counter()
    try:
        witness = auxfun.minimal_nonvanishing_order(inst, params, sol.eta, coeffs)
    except GelfondError as exc:
        raise StageFailure("order", str(exc)) from exc
    timings["order"] = time.perf_counter() - t0
    if witness.r < params.n:
        raise StageFailure("order", f"r = {witness.r} < n = {params.n}")
    if witness.rho.is_zero() or witness.norm_rho == 0:
        raise StageFailure("order", "rho is zero")

    try:
        norm_report = auxfun.norm_lower_bound_check(inst, params, witness)
    except GelfondError as exc:
        raise StageFailure("norm", str(exc)) from exc
    if not (norm_report["norm_cleared_ge_1"] and norm_report["norm_rho_ge_bound"]):
        raise StageFailure("norm", "norm lower bound failed")

    return {
        "matrix": matrix,
        "matrix_report": matrix_report.to_json(),
        "eta": sol,
        "injective": injective,
        "witness": witness,
        "norm": norm_report,
    }


def _run_pipeline(inst, obj, precision, target_width, timings):
    params = auxfun.params_for(inst)
    alg = _algebraic_stages(inst, params, timings)
    sol, witness = alg["eta"], alg["witness"]

    t0 = time.perf_counter()
    table, thr, bits = _constants_and_threshold(inst, params, precision)
    timings["constants"] = time.perf_counter() - t0

    house_rho = auxfun.house_rho_upper_check(inst, params, witness, table)

    t0 = time.perf_counter()
    try:
        chain, chain_bits = _with_precision(
            lambda b: analytic.bound_chain_report(inst, params, sol.eta, witness, table, b), bits
        )
    except PrecisionExhausted as exc:
        chain, chain_bits = {"status": "undecided", "reason": str(exc)}, MAX_PRECISION
    timings["bound_chain"] = time.perf_counter() - t0
    if isinstance(chain.get("separation"), dict) and not chain["separation"]["holds"]:
        raise StageFailure("separation", "contour is too close to the poles")

    t0 = time.perf_counter()
    contour = analytic.Contour.for_order(params.m, witness.r, params.q)
    cauchy = []
    for w in DEMO_SAMPLE_POINTS:
        try:
            cauchy.append(analytic.cauchy_self_test(inst, sol.eta, w, contour, target_width, chain_bits, params))
        except WidthNotReached as exc:
            cauchy.append({"status": "undecided", "reason": str(exc)})
    timings["cauchy"] = time.perf_counter() - t0

    report = {
        "echo": {"instance": obj, "precision": precision, "target_width": target_width},
        "params": params.to_json(),
        "c_den": inst.c_den,
        "matrix_house": alg["matrix_report"],
        "siegel": sol.siegel_certificate,
        "eta": sol.to_json(),
        "injective": alg["injective"],
        "order": witness.to_json(),
        "r_ge_n": witness.r >= params.n,
        "norm_lower_bound": alg["norm"],
        "house_rho": house_rho,
        "bound_chain": chain,
        "cauchy_self_test": cauchy,
        "constants": table.to_json(),
        "constant_checks": table.checks,
        "threshold": thr,
        "step8_exponent": consts.step8_exponents(inst.field.degree, witness.r),
        "precision_used": max([bits, chain_bits] + [c["precision"] for c in cauchy if "precision" in c]),
    }
    summary = (
        f"r = {witness.r} (n = {params.n}), l0 = {witness.l0}, N(rho) = {witness.norm_rho}; "
        f"house(rho) <= middle: {house_rho['house_le_middle']}; "
        f"log10 c15 <= {table.log10_upper('c15'):.2f}; r* ~ 10^{thr['r_star_log10']:.1f}"
    )
    return report, summary


def cmd_pipeline(args):
    inst, obj = _instance(args, args.precision)
    timings = {}
    report, summary = _run_pipeline(inst, obj, args.precision, args.target_width, timings)
    report["timings"] = timings
    return report, summary


def cmd_synthetic_validate(args):
    inst, obj = _instance(args, args.precision)
    if inst.mode != auxfun.SYNTHETIC:
        raise UsageError("synthetic-validate needs a synthetic instance")
    params = auxfun.params_for(inst)
    timings = {}
    alg = _algebraic_stages(inst, params, timings)
    t0 = time.perf_counter()
    eq7 = analytic.validate_eq7_synthetic(inst, params, alg["eta"].eta, alg["witness"], args.precision, args.target_width)
    timings["eq7"] = time.perf_counter() - t0
    report = {
        "echo": {"instance": obj, "precision": args.precision, "target_width": args.target_width},
        "params": params.to_json(),
        "eta": alg["eta"].to_json(),
        "injective": alg["injective"],
        "order": alg["witness"].to_json(),
        "norm_lower_bound": alg["norm"],
        "eq7": eq7,
        "timings": timings,
    }
    if not eq7["overlap"]:
        raise StageFailure("eq7", "exact rho and contour value do not overlap")
    if args.target_width is not None and eq7["combined_width"] > args.target_width:
        raise StageFailure("eq7", f"combined width {eq7['combined_width']} > {args.target_width}")
    return report, f"eq7 overlap with combined width {eq7['combined_width']:.3g}"


COMMANDS = {
    "house": cmd_house,
    "minpoly": cmd_minpoly,
    "norm": cmd_norm,
    "siegel": cmd_siegel,
    "pipeline": cmd_pipeline,
    "synthetic-validate": cmd_synthetic_validate,
    "constants": cmd_constants,
    "threshold": cmd_threshold,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="gelfond", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--instance")
        p.add_argument("--field")
        p.add_argument("--elem")
        p.add_argument("--matrix")
        p.add_argument("--precision", type=int, default=128)
        p.add_argument("--q", type=int)
        p.add_argument("--mode", choices=auxfun.MODES)
        p.add_argument("--target-width", type=float, default=None)
        p.add_argument("--json-only", action="store_true")
    return parser


def _default_width(args):
    if args.target_width is None:
        if args.command == "pipeline":
            args.target_width = 1e-8
        elif args.command == "synthetic-validate":
            args.target_width = 1e-10


def run_command(argv):
    """Run one subcommand; returns (exit status, report dict or None)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    _default_width(args)
    if args.command in ("pipeline", "synthetic-validate", "constants", "threshold") and not args.instance:
        print("error: --instance is required", file=sys.stderr)
        return 2, None
    try:
        report, summary = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2, None
    except StageFailure as exc:
        print(f"assertion failed in stage {exc.stage}: {exc}", file=sys.stderr)
        out = {"status": "failed", "stage": exc.stage, "message": str(exc)}
        print(json.dumps(out, sort_keys=True))
        return 1, out
    except GelfondError as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2, None
    report["status"] = "ok"
    print(json.dumps(report, sort_keys=True, default=str))
    if not args.json_only:
        print(summary, file=sys.stderr)
    return 0, report


def main(argv=None):
    status, _ = run_command(sys.argv[1:] if argv is None else argv)
    return status


if __name__ == "__main__":
    sys.exit(main())
